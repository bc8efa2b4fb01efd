#include "exdag/runner.hpp"

#include <chrono>
#include <exception>

namespace exdag {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

// Quotes a CSV field when it holds a separator, quote or newline.
std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + "\"";
}

} // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
  case Strategy::def:
    return "def";
  case Strategy::bru:
    return "bru";
  case Strategy::brd:
    return "brd";
  case Strategy::ebc:
    return "ebc";
  case Strategy::ebd:
    return "ebd";
  case Strategy::cmb:
    return "cmb";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (Strategy s : {Strategy::def, Strategy::bru, Strategy::brd,
                     Strategy::ebc, Strategy::ebd, Strategy::cmb}) {
    if (to_string(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

StrategyPlan plan(Strategy s) noexcept {
  switch (s) {
  case Strategy::def:
    return {};
  case Strategy::bru:
    return {WeightPolicy::unit, ErrorPolicy::def};
  case Strategy::brd:
    return {WeightPolicy::depth, ErrorPolicy::def};
  case Strategy::ebc:
    return {std::nullopt, ErrorPolicy::ebc};
  case Strategy::ebd:
    return {std::nullopt, ErrorPolicy::ebd};
  case Strategy::cmb:
    return {WeightPolicy::depth, ErrorPolicy::ebc};
  }
  return {};
}

ResultRow run_once(const RunConfig &config, int repeat_index,
                   const DagObserver &observe) {
  ResultRow row;
  row.shape = std::string(to_string(config.spec.shape));
  row.n = config.spec.n;
  row.seed = config.spec.seed;
  row.strategy = std::string(to_string(config.strategy));
  row.threads = config.threads;
  row.q = config.q;
  row.repeat_index = repeat_index;

  GeneratorSpec spec = config.spec;
  spec.seed += static_cast<std::uint64_t>(repeat_index);
  ExpressionDag dag = generate(spec);
  row.depth_before = row.depth_after = dag.depth();

  const auto t0 = Clock::now();
  const StrategyPlan p = plan(config.strategy);
  EvalOptions opts;
  opts.policy = p.policy;
  opts.threads = config.threads;
  opts.mark_evaluated = false;
  if (p.restructure) {
    RestructureResult r = restructure(dag, *p.restructure);
    dag = std::move(r.dag);
    row.depth_after = r.depth_after;
  }
  const auto t1 = Clock::now();
  row.restructure_ms = ms_between(t0, t1);
  if (observe && repeat_index == 0) {
    observe(dag);
  }
  try {
    const EvalResult result = evaluate(dag, config.q, opts);
    row.total_cost_bits = result.report.total_cost;
    row.critical_path_bits = result.report.critical_path_cost;
  } catch (const std::exception &e) {
    row.error = e.what();
  }
  row.wall_ms = ms_between(t0, Clock::now());
  return row;
}

std::vector<ResultRow> run(const RunConfig &config, const DagObserver &observe) {
  std::vector<ResultRow> rows;
  for (int i = 0; i < config.repeats; ++i) {
    rows.push_back(run_once(config, i, observe));
  }
  return rows;
}

void write_csv(std::ostream &out, const std::vector<ResultRow> &rows) {
  out << kCsvHeader << '\n';
  for (const ResultRow &r : rows) {
    out << r.shape << ',' << r.n << ',' << r.seed << ',' << r.strategy << ','
        << r.threads << ',' << r.q << ',' << r.repeat_index << ','
        << r.wall_ms << ',' << r.restructure_ms << ',' << r.total_cost_bits
        << ',' << r.critical_path_bits << ',' << r.depth_before << ','
        << r.depth_after << ',' << csv_field(r.error) << '\n';
  }
}

} // namespace exdag
