#include "reference.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace exdag::testing {

BigFloat reference_value(const ExpressionDag &dag, mpfr_prec_t precision) {
  std::vector<std::optional<BigFloat>> v(dag.size());
  for (NodeId id : dag.reachable()) {
    const Node &n = dag[id];
    BigFloat out(precision);
    mpfr_ptr o = out.get();
    auto l = [&] { return v[n.left.index()]->get(); };
    auto r = [&] { return v[n.right.index()]->get(); };
    switch (n.kind) {
    case OpKind::leaf:
      mpfr_set_d(o, n.value, MPFR_RNDN);
      break;
    case OpKind::neg:
      mpfr_neg(o, l(), MPFR_RNDN);
      break;
    case OpKind::add:
      mpfr_add(o, l(), r(), MPFR_RNDN);
      break;
    case OpKind::sub:
      mpfr_sub(o, l(), r(), MPFR_RNDN);
      break;
    case OpKind::mul:
      mpfr_mul(o, l(), r(), MPFR_RNDN);
      break;
    case OpKind::div:
      mpfr_div(o, l(), r(), MPFR_RNDN);
      break;
    case OpKind::root:
      mpfr_rootn_ui(o, l(), n.degree, MPFR_RNDN);
      break;
    }
    v[id.index()] = std::move(out);
  }
  return *v[dag.root().index()];
}

double log2_distance(const BigFloat &a, const BigFloat &b) {
  const mpfr_prec_t p = std::max(a.precision(), b.precision()) + 64;
  BigFloat d(p);
  mpfr_sub(d.get(), a.get(), b.get(), MPFR_RNDN);
  return d.log2_abs_upper();
}

std::vector<mpz_class> exact_operator_counts(const ExpressionDag &dag) {
  std::vector<mpz_class> c(dag.size());
  for (std::size_t i = 0; i < dag.size(); ++i) {
    const Node &n = dag.nodes()[i];
    if (n.is_leaf()) {
      continue;
    }
    c[i] = 1;
    c[i] += c[n.left.index()];
    if (n.right.valid()) {
      c[i] += c[n.right.index()];
    }
  }
  return c;
}

double log2_of(const mpz_class &x) {
  if (x == 0) {
    return -std::numeric_limits<double>::infinity();
  }
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log2(m) + static_cast<double>(exp);
}

} // namespace exdag::testing
