#include "exdag/evaluation.hpp"

#include "exdag/balance.hpp"
#include "exdag/enclosure.hpp"
#include "exdag/errors.hpp"
#include "exdag/log_weight.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

namespace exdag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Smallest integer k >= x, nudged up when x sits just below an integer so
// that c 2^(-k) <= 1 survives the upward-rounded budget check.
double ceil_log(double x) {
  if (x == std::floor(x)) {
    return x;
  }
  return std::ceil(x + 1e-9);
}

// Error sum in the log domain: log2(sum 2^t_i), rounded to nearest with a
// fixed relative slack.
double log_sum(std::initializer_list<double> terms) {
  double m = -kInf;
  for (double t : terms) {
    m = std::max(m, t);
  }
  if (std::isinf(m)) {
    return m;
  }
  double s = 0.0;
  for (double t : terms) {
    if (!std::isinf(t)) {
      s += std::exp2(t - m);
    }
  }
  return m + std::log2(s) + 1e-12;
}

struct Demand {
  double request = kInf; // log2 of the allowed error; +inf = unused
  double inc_v = 0.0;
  PropagationConstants pc;
};

class Evaluator {
public:
  Evaluator(const ExpressionDag &dag, const EvalOptions &options)
      : dag_(dag), options_(options) {}

  EvalResult run(long q) {
    EvalResult result;
    auto t0 = Clock::now();
    const std::vector<NodeId> order = dag_.reachable();
    const MagnitudeBounds bounds(dag_);
    result.report.bounds_ms = ms_since(t0);

    t0 = Clock::now();
    demand_.assign(dag_.size(), Demand{});
    demand_[dag_.root().index()].request = static_cast<double>(q);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      propagate(*it, bounds);
    }
    result.report.demand_ms = ms_since(t0);

    t0 = Clock::now();
    approx_.assign(dag_.size(), std::nullopt);
    std::vector<NodeId> work;
    for (NodeId v : order) {
      if (!std::isinf(demand_[v.index()].request)) {
        work.push_back(v);
      }
    }
    magnitude_.assign(dag_.size(), -kInf);
    for (NodeId v : work) {
      magnitude_[v.index()] = bounds[v].log2_abs_upper();
    }
    if (options_.threads <= 1) {
      for (NodeId v : work) {
        compute(v);
      }
    } else {
      run_pool(work);
    }
    result.report.compute_ms = ms_since(t0);

    CostReport &r = result.report;
    for (NodeId v : work) {
      const Approximation &a = *approx_[v.index()];
      r.nodes.push_back({v, demand_[v.index()].request, a.precision});
    }
    std::tie(r.total_cost, r.critical_path_cost) = cost_summary(dag_, r);
    r.depth = dag_.depth();
    result.value = *approx_[dag_.root().index()];
    return result;
  }

  std::vector<std::optional<Approximation>> &approximations() {
    return approx_;
  }

private:
  ParameterTriple parameters(NodeId v, const OperationConstants &c) const {
    const Node &n = dag_[v];
    switch (options_.policy) {
    case ErrorPolicy::def:
      return default_parameters(n.kind, c);
    case ErrorPolicy::ebc:
      return parameters_from_weights(
          dag_[n.left].log_op_count,
          n.right.valid() ? dag_[n.right].log_op_count : LogWeight::zero(), c);
    case ErrorPolicy::ebd:
      return n.right.valid()
                 ? depth_heuristic_parameters(dag_[n.left].subtree_depth,
                                              dag_[n.right].subtree_depth, c)
                 : depth_heuristic_unary(dag_[n.left].subtree_depth, c);
    }
    return {};
  }

  void propagate(NodeId v, const MagnitudeBounds &bounds) {
    Demand &d = demand_[v.index()];
    const Node &n = dag_[v];
    if (std::isinf(d.request) || n.is_leaf()) {
      return;
    }
    d.pc = propagation_constants(dag_, v, bounds);
    if (d.pc.exact_zero) {
      return;
    }
    const ParameterTriple p = parameters(v, d.pc.constants);
    if (!satisfies_budget(p, d.pc.constants)) {
      throw std::logic_error("error budget exceeded at node " +
                             std::to_string(v.value));
    }
    d.inc_v = p.inc_v;
    auto ask = [&](NodeId child, double inc, double cap) {
      // A leaf side with no budget share still gets a finite request.
      const double r = std::isinf(inc) ? d.request : d.request + inc;
      double &slot = demand_[child.index()].request;
      slot = std::min(slot, std::min(r, cap));
    };
    ask(n.left, p.inc_l, d.pc.cap_l);
    if (n.right.valid()) {
      ask(n.right, p.inc_r, d.pc.cap_r);
    }
  }

  void compute(NodeId v) {
    const Node &n = dag_[v];
    const Demand &d = demand_[v.index()];
    Approximation a;
    if (n.is_leaf()) {
      a.value = BigFloat(n.value, 53);
      approx_[v.index()] = std::move(a);
      return;
    }
    if (d.pc.exact_zero) {
      a.value = BigFloat(mpfr_prec_t{2});
      a.precision = 0;
      approx_[v.index()] = std::move(a);
      return;
    }
    // |v~| <= |v|_high + 2^a, rounding error <= 2^(a + i_v - 1).
    const double mag = log_add(LogWeight{magnitude_[v.index()]},
                               LogWeight{d.request})
                           .lw;
    const double bits = std::ceil(mag - (d.request + d.inc_v)) + 2.0;
    if (!(bits <= static_cast<double>(options_.precision_cap))) {
      throw PrecisionOverflow("node " + std::to_string(v.value) + " needs " +
                              std::to_string(bits) + " bits");
    }
    const mpfr_prec_t p =
        std::max<mpfr_prec_t>(2, static_cast<mpfr_prec_t>(bits));
    a.precision = p;
    a.value = BigFloat(p);
    mpfr_ptr out = a.value.get();
    const Approximation &l = *approx_[n.left.index()];
    const Approximation *r =
        n.right.valid() ? &*approx_[n.right.index()] : nullptr;
    int ternary = 0;
    switch (n.kind) {
    case OpKind::neg:
      ternary = mpfr_neg(out, l.value.get(), MPFR_RNDN);
      break;
    case OpKind::add:
      ternary = mpfr_add(out, l.value.get(), r->value.get(), MPFR_RNDN);
      break;
    case OpKind::sub:
      ternary = mpfr_sub(out, l.value.get(), r->value.get(), MPFR_RNDN);
      break;
    case OpKind::mul:
      ternary = mpfr_mul(out, l.value.get(), r->value.get(), MPFR_RNDN);
      break;
    case OpKind::div:
      ternary = mpfr_div(out, l.value.get(), r->value.get(), MPFR_RNDN);
      break;
    case OpKind::root:
      ternary = mpfr_rootn_ui(out, l.value.get(), n.degree, MPFR_RNDN);
      break;
    case OpKind::leaf:
      break;
    }
    const double rounding =
        ternary == 0 ? -kInf
                     : static_cast<double>(mpfr_get_exp(out) - p);
    const OperationConstants &c = d.pc.constants;
    auto carried = [](double log2_c, double e) {
      return std::isinf(log2_c) || std::isinf(e) ? -kInf : log2_c + e;
    };
    a.error_log2 = log_sum({rounding, carried(c.log2_left, l.error_log2),
                            r ? carried(c.log2_right, r->error_log2) : -kInf});
    if (a.error_log2 > d.request) {
      throw std::logic_error("error bound missed at node " +
                             std::to_string(v.value));
    }
    if (!std::isinf(a.error_log2)) {
      a.error_exponent = static_cast<long>(std::ceil(a.error_log2));
    }
    approx_[v.index()] = std::move(a);
  }

  void run_pool(const std::vector<NodeId> &work) {
    std::vector<std::vector<NodeId>> parents(dag_.size());
    std::vector<int> pending(dag_.size(), 0);
    std::deque<NodeId> ready;
    for (NodeId v : work) {
      const Node &n = dag_[v];
      if (!demand_[v.index()].pc.exact_zero) {
        for_each_child(n, [&](NodeId c) {
          parents[c.index()].push_back(v);
          ++pending[v.index()];
        });
      }
      if (pending[v.index()] == 0) {
        ready.push_back(v);
      }
    }
    std::mutex mu;
    std::condition_variable cv;
    std::size_t done = 0;
    std::exception_ptr failure;
    auto worker = [&] {
      std::unique_lock lock(mu);
      std::optional<NodeId> next; // a parent this worker made ready
      for (;;) {
        if (!next) {
          cv.wait(lock, [&] {
            return !ready.empty() || done == work.size() || failure;
          });
          if (done == work.size() || failure) {
            return;
          }
          next = ready.front();
          ready.pop_front();
        }
        const NodeId v = *next;
        next.reset();
        lock.unlock();
        std::exception_ptr err;
        try {
          compute(v);
        } catch (...) {
          err = std::current_exception();
        }
        lock.lock();
        if (err) {
          failure = err;
          cv.notify_all();
          return;
        }
        if (++done == work.size()) {
          cv.notify_all();
          return;
        }
        for (NodeId p : parents[v.index()]) {
          if (--pending[p.index()] != 0) {
            continue;
          }
          if (!next) {
            next = p;
          } else {
            ready.push_back(p);
            cv.notify_one();
          }
        }
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < options_.threads; ++i) {
      pool.emplace_back(worker);
    }
    for (auto &t : pool) {
      t.join();
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
  }

  const ExpressionDag &dag_;
  EvalOptions options_;
  std::vector<Demand> demand_;
  std::vector<double> magnitude_;
  std::vector<std::optional<Approximation>> approx_;
};

} // namespace

ParameterTriple default_parameters(OpKind kind, const OperationConstants &c) {
  ParameterTriple p;
  switch (arity(kind)) {
  case 0:
    p.inc_v = 0.0;
    break;
  case 1:
    p.inc_v = -1.0;
    p.inc_l = -1.0 - std::max(0.0, ceil_log(c.log2_left));
    break;
  default:
    p.inc_v = -1.0;
    p.inc_l = -2.0 - std::max(0.0, ceil_log(c.log2_left));
    p.inc_r = -2.0 - std::max(0.0, ceil_log(c.log2_right));
    break;
  }
  return p;
}

EvalResult evaluate(ExpressionDag &dag, long q, const EvalOptions &options) {
  if (options.threads < 1) {
    throw std::invalid_argument("threads must be positive");
  }
  Evaluator ev(dag, options);
  EvalResult result = ev.run(q);
  if (options.mark_evaluated) {
    auto &approx = ev.approximations();
    for (const NodeCost &rec : result.report.nodes) {
      if (!dag[rec.id].is_leaf()) {
        dag.mark_evaluated(rec.id, std::move(*approx[rec.id.index()]));
      }
    }
  }
  return result;
}

std::pair<std::uint64_t, std::uint64_t> cost_summary(const ExpressionDag &dag,
                                                     const CostReport &report) {
  std::vector<std::uint64_t> weight(dag.size(), 0);
  std::uint64_t total = 0;
  for (const NodeCost &rec : report.nodes) {
    const auto p = static_cast<std::uint64_t>(std::abs(rec.precision));
    weight[rec.id.index()] = p;
    total += p;
  }
  std::vector<std::uint64_t> path(dag.size(), 0);
  std::uint64_t critical = 0;
  for (NodeId v : dag.reachable()) {
    const Node &n = dag[v];
    std::uint64_t below = 0;
    for_each_child(n, [&](NodeId c) { below = std::max(below, path[c.index()]); });
    path[v.index()] = weight[v.index()] + below;
    critical = std::max(critical, path[v.index()]);
  }
  return {total, critical};
}

} // namespace exdag
