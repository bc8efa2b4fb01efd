// exdag: generate expression DAGs, run evaluation experiments, evaluate files.

#include "exdag/errors.hpp"
#include "exdag/evaluation.hpp"
#include "exdag/generators.hpp"
#include "exdag/runner.hpp"
#include "exdag/serialize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kUsage = 1;
constexpr int kAllFailed = 2;

const std::vector<std::string> kShapes = {"list", "blocking", "balanced",
                                          "self_add", "shared"};
const std::vector<std::string> kStrategies = {"def", "bru", "brd",
                                              "ebc", "ebd", "cmb"};

struct SpecArgs {
  std::string shape = "list";
  int n = 64;
  std::uint64_t seed = 1;
  double blocking_fraction = 0.30;
  double share_fraction = 0.05;
  int blocking_count = 0;

  exdag::GeneratorSpec spec() const {
    exdag::GeneratorSpec s;
    s.shape = *exdag::parse_shape(shape);
    s.n = n;
    s.seed = seed;
    s.blocking_fraction = blocking_fraction;
    s.share_fraction = share_fraction;
    s.blocking_count = blocking_count;
    return s;
  }
};

void add_spec_options(CLI::App *cmd, SpecArgs &a) {
  cmd->add_option("--shape", a.shape, "DAG family")
      ->check(CLI::IsMember(kShapes))
      ->capture_default_str();
  cmd->add_option("--n", a.n, "operator count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "random seed")->capture_default_str();
  cmd->add_option("--blocking-fraction", a.blocking_fraction,
                  "probability of an extra reference per chain operator")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--blocking-count", a.blocking_count,
                  "exact number of equally spaced blockers (overrides fraction)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--share-fraction", a.share_fraction,
                  "probability of reusing a subtree")
      ->check(CLI::Range(0.0, 0.95))
      ->capture_default_str();
}

bool write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  return true;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Accuracy-driven evaluation of expression DAGs"};
  app.require_subcommand(1);

  SpecArgs spec_args;
  std::string strategy = "def";
  int threads = 1;
  long q = -2000;
  int repeats = 5;
  std::string csv_path, dot_path, graph_path;

  CLI::App *run_cmd = app.add_subcommand("run", "run an experiment, write CSV");
  add_spec_options(run_cmd, spec_args);
  run_cmd->add_option("--strategy", strategy, "balancing strategy")
      ->check(CLI::IsMember(kStrategies))
      ->capture_default_str();
  run_cmd->add_option("--threads", threads, "evaluation threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--q", q, "target accuracy exponent (<= 0)")
      ->check(CLI::Range(-(1L << 40), 0L))
      ->capture_default_str();
  run_cmd->add_option("--repeats", repeats, "repetitions (seed + i)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--csv", csv_path, "output CSV path")->required();
  run_cmd->add_option("--dump-dot", dot_path,
                      "write the first evaluated DAG as Graphviz");
  run_cmd->add_option("--dump-graph", graph_path,
                      "write the first evaluated DAG in text form");

  SpecArgs gen_args;
  std::string gen_out;
  CLI::App *gen_cmd = app.add_subcommand("gen", "print a generated DAG");
  add_spec_options(gen_cmd, gen_args);
  gen_cmd->add_option("-o,--output", gen_out, "write to a file, not stdout");

  std::string eval_in;
  std::string eval_policy = "def";
  long eval_q = -100;
  int eval_threads = 1;
  CLI::App *eval_cmd =
      app.add_subcommand("eval", "evaluate a DAG in text form");
  eval_cmd->add_option("file", eval_in, "DAG file, - for stdin")->required();
  eval_cmd->add_option("--q", eval_q, "target accuracy exponent")
      ->capture_default_str();
  eval_cmd->add_option("--policy", eval_policy, "def, ebc or ebd")
      ->check(CLI::IsMember({"def", "ebc", "ebd"}))
      ->capture_default_str();
  eval_cmd->add_option("--threads", eval_threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  if (*run_cmd) {
    exdag::RunConfig cfg;
    cfg.spec = spec_args.spec();
    cfg.strategy = *exdag::parse_strategy(strategy);
    cfg.threads = threads;
    cfg.q = q;
    cfg.repeats = repeats;
    bool dumps_ok = true;
    auto observe = [&](const exdag::ExpressionDag &dag) {
      if (!dot_path.empty()) {
        dumps_ok &= write_file(dot_path, exdag::export_dot(dag));
      }
      if (!graph_path.empty()) {
        dumps_ok &= write_file(graph_path, exdag::serialize(dag));
      }
    };
    const auto rows = exdag::run(cfg, observe);
    std::ofstream out(csv_path);
    exdag::write_csv(out, rows);
    if (!out || !dumps_ok) {
      std::cerr << "cannot write " << csv_path << "\n";
      return kUsage;
    }
    std::size_t failed = 0;
    for (const auto &r : rows) {
      if (!r.error.empty()) {
        std::cerr << "repeat " << r.repeat_index << ": " << r.error << "\n";
        ++failed;
      }
    }
    return failed == rows.size() ? kAllFailed : 0;
  }

  if (*gen_cmd) {
    const std::string text = exdag::serialize(exdag::generate(gen_args.spec()));
    if (gen_out.empty()) {
      std::cout << text;
      return 0;
    }
    return write_file(gen_out, text) ? 0 : kUsage;
  }

  // eval
  std::string text;
  if (eval_in == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    std::ifstream in(eval_in);
    if (!in) {
      std::cerr << "cannot read " << eval_in << "\n";
      return kUsage;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    exdag::ExpressionDag dag = exdag::parse(text);
    exdag::EvalOptions opts;
    opts.policy = eval_policy == "ebc"   ? exdag::ErrorPolicy::ebc
                  : eval_policy == "ebd" ? exdag::ErrorPolicy::ebd
                                         : exdag::ErrorPolicy::def;
    opts.threads = eval_threads;
    const auto result = exdag::evaluate(dag, eval_q, opts);
    const int digits =
        static_cast<int>(std::min<long>(-eval_q, 100000) * 0.30103) + 2;
    std::cout << result.value.value.to_string(digits) << "\n"
              << "error_log2 " << result.value.error_log2 << "\n"
              << "total_cost_bits " << result.report.total_cost << "\n"
              << "critical_path_bits " << result.report.critical_path_cost
              << "\n";
  } catch (const exdag::ParseError &e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << e.what() << "\n";
    return kAllFailed;
  }
  return 0;
}
