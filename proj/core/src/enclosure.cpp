#include "exdag/enclosure.hpp"

#include "exdag/errors.hpp"
#include "exdag/log_weight.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exdag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string where(NodeId id) { return "node " + std::to_string(id.value); }

Interval make_interval(mpfr_prec_t p) { return {BigFloat(p), BigFloat(p)}; }

Interval neg(const Interval &x, mpfr_prec_t p) {
  Interval r = make_interval(p);
  mpfr_neg(r.lo.get(), x.hi.get(), MPFR_RNDD);
  mpfr_neg(r.hi.get(), x.lo.get(), MPFR_RNDU);
  return r;
}

Interval add(const Interval &x, const Interval &y, mpfr_prec_t p) {
  Interval r = make_interval(p);
  mpfr_add(r.lo.get(), x.lo.get(), y.lo.get(), MPFR_RNDD);
  mpfr_add(r.hi.get(), x.hi.get(), y.hi.get(), MPFR_RNDU);
  return r;
}

Interval sub(const Interval &x, const Interval &y, mpfr_prec_t p) {
  Interval r = make_interval(p);
  mpfr_sub(r.lo.get(), x.lo.get(), y.hi.get(), MPFR_RNDD);
  mpfr_sub(r.hi.get(), x.hi.get(), y.lo.get(), MPFR_RNDU);
  return r;
}

using BinaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

// Hull of the four endpoint combinations; valid for mul, and for div when y
// excludes zero.
Interval corners(const Interval &x, const Interval &y, mpfr_prec_t p,
                 BinaryFn fn) {
  Interval r = make_interval(p);
  BigFloat t(p);
  bool first = true;
  for (const BigFloat *a : {&x.lo, &x.hi}) {
    for (const BigFloat *b : {&y.lo, &y.hi}) {
      fn(t.get(), a->get(), b->get(), MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo.get())) {
        mpfr_set(r.lo.get(), t.get(), MPFR_RNDD);
      }
      fn(t.get(), a->get(), b->get(), MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi.get())) {
        mpfr_set(r.hi.get(), t.get(), MPFR_RNDU);
      }
      first = false;
    }
  }
  return r;
}

Interval root(const Interval &x, int degree, mpfr_prec_t p) {
  Interval r = make_interval(p);
  mpfr_rootn_ui(r.lo.get(), x.lo.get(), degree, MPFR_RNDD);
  mpfr_rootn_ui(r.hi.get(), x.hi.get(), degree, MPFR_RNDU);
  return r;
}

enum class Step { ok, undecided };

// Interval of one operator node from its children's intervals. A divisor or
// radicand that straddles zero is reported as undecided.
Step combine(const ExpressionDag &dag, NodeId id, const Interval *l,
             const Interval *r, mpfr_prec_t p, Interval &out) {
  const Node &n = dag[id];
  switch (n.kind) {
  case OpKind::leaf:
    out = Interval::point(n.value);
    return Step::ok;
  case OpKind::neg:
    out = neg(*l, p);
    return Step::ok;
  case OpKind::add:
    out = add(*l, *r, p);
    return Step::ok;
  case OpKind::sub:
    out = sub(*l, *r, p);
    return Step::ok;
  case OpKind::mul:
    out = corners(*l, *r, p, mpfr_mul);
    return Step::ok;
  case OpKind::div:
    if (r->is_zero()) {
      throw DivisionByZero("division by zero at " + where(id));
    }
    if (r->straddles_zero()) {
      return Step::undecided;
    }
    out = corners(*l, *r, p, mpfr_div);
    return Step::ok;
  case OpKind::root:
    if (l->is_zero()) {
      out = make_interval(p);
      return Step::ok;
    }
    if (l->straddles_zero()) {
      return Step::undecided;
    }
    if (n.degree % 2 == 0 && l->hi.sign() < 0) {
      throw DomainError("even root of a negative value at " + where(id));
    }
    out = root(*l, n.degree, p);
    return Step::ok;
  }
  return Step::ok;
}

// Recomputes the subgraph below `id` at precision p. Empty when some divisor
// or radicand inside it is still undecided at this precision.
std::optional<Interval> enclose_at(const ExpressionDag &dag, NodeId id,
                                   mpfr_prec_t p) {
  const std::vector<NodeId> order = dag.reachable(id);
  std::vector<std::optional<Interval>> iv(id.index() + 1);
  for (NodeId v : order) {
    const Node &n = dag[v];
    const Interval *l = n.left.valid() ? &*iv[n.left.index()] : nullptr;
    const Interval *r = n.right.valid() ? &*iv[n.right.index()] : nullptr;
    Interval out;
    if (combine(dag, v, l, r, p, out) == Step::undecided) {
      return std::nullopt;
    }
    iv[v.index()] = std::move(out);
  }
  return std::move(iv[id.index()]);
}



// Upper bound on log2(1/d).
double log2_inv_degree_upper(int degree) {
  return -(std::nextafter(std::log2(static_cast<double>(degree)), -kInf));
}

// Upper bound on (1/d) * low^((1-d)/d) in log2, given a lower bound on
// log2(low).
double root_factor(int degree, double log2_low) {
  const double e = (1.0 - degree) / degree; // negative
  const double e_lo = std::nextafter(e, -kInf);
  const double e_hi = std::nextafter(e, kInf);
  // e * log2_low rounded up: pick the exponent end that maximises the product.
  const double prod = log2_low < 0 ? mul_up(e_lo, log2_low)
                                   : mul_up(e_hi, log2_low);
  return add_up(log2_inv_degree_upper(degree), prod);
}

// Slightly more than -log2(15/16) = 0.09310940...
constexpr double kWidenLog2 = 0.0932;
// Slightly more than log2(17/16) = 0.08746284...
constexpr double kGrowLog2 = 0.0875;

} // namespace

Interval Interval::point(double v) {
  return {BigFloat(v, kEnclosurePrecision), BigFloat(v, kEnclosurePrecision)};
}

double Interval::log2_abs_upper() const {
  return std::max(lo.log2_abs_upper(), hi.log2_abs_upper());
}

double Interval::log2_abs_lower() const {
  if (contains_zero()) {
    return -kInf;
  }
  return std::min(lo.log2_abs_lower(), hi.log2_abs_lower());
}

std::pair<double, double> Interval::to_doubles() const {
  return {lo.to_double(MPFR_RNDD), hi.to_double(MPFR_RNDU)};
}

MagnitudeBounds::MagnitudeBounds(const ExpressionDag &dag)
    : MagnitudeBounds(dag, dag.root()) {}

MagnitudeBounds::MagnitudeBounds(const ExpressionDag &dag, NodeId root) {
  bounds_.resize(root.index() + 1);
  for (NodeId v : dag.reachable(root)) {
    const Node &n = dag[v];
    const Interval *l = n.left.valid() ? &*bounds_[n.left.index()] : nullptr;
    const Interval *r = n.right.valid() ? &*bounds_[n.right.index()] : nullptr;
    Interval out;
    if (combine(dag, v, l, r, kEnclosurePrecision, out) == Step::undecided) {
      const NodeId arg = n.kind == OpKind::div ? n.right : n.left;
      bool separated = false;
      mpfr_prec_t p = kEnclosurePrecision;
      for (int k = 0; k < kMaxRefinements && !separated; ++k) {
        p *= 2;
        std::optional<Interval> refined = enclose_at(dag, arg, p);
        if (refined && !refined->straddles_zero()) {
          bounds_[arg.index()] = std::move(*refined);
          separated = true;
        }
      }
      if (!separated) {
        throw SeparationError("cannot decide the sign of node " +
                              std::to_string(arg.value) + " below " +
                              where(v));
      }
      combine(dag, v, &*bounds_[n.left.index()],
              n.right.valid() ? &*bounds_[n.right.index()] : nullptr,
              kEnclosurePrecision, out);
    }
    bounds_[v.index()] = std::move(out);
  }
}

const Interval &MagnitudeBounds::operator[](NodeId id) const {
  if (!has(id)) {
    throw std::out_of_range("no enclosure for " + where(id));
  }
  return *bounds_[id.index()];
}

Interval magnitude_bounds(const ExpressionDag &dag, NodeId id) {
  return MagnitudeBounds(dag, id)[id];
}

OperationConstants operation_constants(const ExpressionDag &dag, NodeId id,
                                       const MagnitudeBounds &bounds) {
  const Node &n = dag[id];
  OperationConstants c;
  switch (n.kind) {
  case OpKind::leaf:
    break;
  case OpKind::neg:
    c.log2_left = 0.0;
    break;
  case OpKind::add:
  case OpKind::sub:
    c.log2_left = 0.0;
    c.log2_right = 0.0;
    break;
  case OpKind::mul:
    c.log2_left = bounds[n.right].log2_abs_upper();
    c.log2_right = bounds[n.left].log2_abs_upper();
    break;
  case OpKind::div: {
    const double y_low = bounds[n.right].log2_abs_lower();
    c.log2_left = -y_low;
    c.log2_right = add_up(bounds[n.left].log2_abs_upper(), mul_up(-2.0, y_low));
    break;
  }
  case OpKind::root:
    if (!bounds[n.left].is_zero()) {
      c.log2_left = root_factor(n.degree, bounds[n.left].log2_abs_lower());
    }
    break;
  }
  return c;
}

PropagationConstants propagation_constants(const ExpressionDag &dag, NodeId id,
                                           const MagnitudeBounds &bounds) {
  const Node &n = dag[id];
  PropagationConstants pc;
  switch (n.kind) {
  case OpKind::leaf:
  case OpKind::neg:
  case OpKind::add:
  case OpKind::sub:
    pc.constants = operation_constants(dag, id, bounds);
    break;
  case OpKind::mul: {
    // The right child is capped at error y_high / 16, so the left factor
    // sees at most (17/16) y_high. An exactly zero y is capped at error 1.
    const double y_high = bounds[n.right].log2_abs_upper();
    if (std::isinf(y_high)) {
      pc.constants.log2_left = 0.0;
      pc.cap_r = 0.0;
    } else {
      pc.constants.log2_left = add_up(y_high, kGrowLog2);
      pc.cap_r = sub_down(y_high, 4.0);
    }
    pc.constants.log2_right = bounds[n.left].log2_abs_upper();
    break;
  }
  case OpKind::div: {
    // The divisor is capped at error y_low / 16, so it stays above
    // (15/16) y_low in magnitude.
    const double y_low = bounds[n.right].log2_abs_lower();
    const double y_wide = sub_down(y_low, kWidenLog2);
    pc.constants.log2_left = -y_wide;
    pc.constants.log2_right = add_up(
        add_up(bounds[n.left].log2_abs_upper(), -y_low), -y_wide);
    pc.cap_r = sub_down(y_low, 4.0);
    break;
  }
  case OpKind::root:
    if (bounds[n.left].is_zero()) {
      pc.exact_zero = true;
      break;
    }
    {
      const double x_low = bounds[n.left].log2_abs_lower();
      const double x_wide = sub_down(x_low, kWidenLog2);
      pc.constants.log2_left = root_factor(n.degree, x_wide);
      pc.cap_l = sub_down(x_low, 4.0);
    }
    break;
  }
  return pc;
}

} // namespace exdag
