// netreg: simulate, distances, estimate, mc, verify.
//
// Exit codes: 0 success, 1 check failure, 2 input error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "netreg/codegree.hpp"
#include "netreg/errors.hpp"
#include "netreg/estimate.hpp"
#include "netreg/experiments.hpp"
#include "netreg/graphon.hpp"
#include "netreg/io.hpp"
#include "netreg/lemmas.hpp"
#include "netreg/parallel.hpp"
#include "netreg/rng.hpp"
#include "netreg/simulate.hpp"

namespace fs = std::filesystem;
using namespace netreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct IoError : Error {
  using Error::Error;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: " + p.string());
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".netreg_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory is not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

// Files written through this guard are deleted unless commit() is reached.
class OutputSet {
 public:
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

  template <class Fn>
  void write(const fs::path& path, Fn&& fn) {
    paths_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
  }

  void commit() { committed_ = true; }

 private:
  std::vector<fs::path> paths_;
  bool committed_ = false;
};

// A JSON document either is the object itself or holds it under `key`.
io::json section(const io::json& doc, const char* key) {
  if (doc.is_object() && doc.contains(key)) return doc.at(key);
  return doc;
}

struct SimulateArgs {
  fs::path config;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  fs::path out;
  bool emit_truth = false;
  std::string adjacency_format = "dense";
};

int cmd_simulate(const SimulateArgs& a) {
  require_file(a.config);
  const io::json doc = io::load_json(a.config);
  const GraphonSpec graphon = io::graphon_from_json(section(doc, "graphon"));
  if (!doc.contains("outcome")) throw ConfigError("config has no 'outcome' section");
  const OutcomeSpec outcome = io::outcome_from_json(doc.at("outcome"));
  prepare_out_dir(a.out);

  const Sample sample = draw_sample(graphon, outcome, a.n, a.seed);
  OutputSet files;
  files.write(a.out / "outcome.csv", [&](std::ostream& o) { io::write_outcome_csv(o, sample); });
  files.write(a.out / "adjacency.csv", [&](std::ostream& o) {
    if (a.adjacency_format == "edges") {
      io::write_edge_list_csv(o, sample.d);
    } else {
      io::write_adjacency_dense_csv(o, sample.d);
    }
  });
  if (a.emit_truth) {
    files.write(a.out / "truth.csv", [&](std::ostream& o) { io::write_truth_csv(o, sample); });
  }
  files.commit();
  fmt::print(stderr, "simulated n={} edges={} density={:.4f}\n", sample.n, sample.d.edge_count(),
             sample.d.density());
  return kExitOk;
}

struct DistancesArgs {
  fs::path adjacency;
  std::optional<fs::path> outcome;
  std::optional<fs::path> out;
};

int cmd_distances(const DistancesArgs& a) {
  require_file(a.adjacency);
  std::optional<std::size_t> n;
  if (a.outcome) {
    require_file(*a.outcome);
    std::ifstream in(*a.outcome);
    n = static_cast<std::size_t>(io::read_outcome_csv(in).y.size());
  }
  std::ifstream in(a.adjacency);
  const AdjacencyMatrix d = io::read_adjacency_csv(in, n);
  const CodegreeDistanceMatrix delta = distance_matrix_fast(d);
  if (a.out) {
    OutputSet files;
    files.write(*a.out, [&](std::ostream& o) { io::write_distance_csv(o, delta); });
    files.commit();
  } else {
    io::write_distance_csv(std::cout, delta);
  }
  fmt::print(stderr, "n={} max dhat={}\n", delta.size(), io::format_double(delta.max_value()));
  return kExitOk;
}

struct EstimateArgs {
  fs::path outcome;
  fs::path adjacency;
  std::string kernel = "boxcar";
  std::optional<double> bandwidth;
  double target_r = kDefaultTargetR;
  double gamma_rate = 1.0;
  fs::path lambda_out = "lambda_hat.csv";
};

void print_diagnostics(const EstimationResult& r) {
  std::vector<double> sorted(r.r_hat.data(), r.r_hat.data() + r.r_hat.size());
  std::sort(sorted.begin(), sorted.end());
  const auto q = [&](double p) { return sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]; };
  fmt::print(stderr, "bandwidth diagnostic (kernel {}, h = {})\n", to_string(r.kernel.kind),
             io::format_double(r.kernel.bandwidth));
  fmt::print(stderr, "  {:<22}{:>14}\n", "quantity", "value");
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "r_hat min", r.r_min);
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "r_hat q25", q(0.25));
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "r_hat median", q(0.5));
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "r_hat mean", r.r_bar);
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "rate n^(-gamma/4)", r.rate_threshold);
  fmt::print(stderr, "  {:<22}{:>14}\n", "r_min above rate", r.r_min > r.rate_threshold ? "yes" : "no");
  fmt::print(stderr, "  {:<22}{:>14}\n", "effective pairs", r.effective_pairs);
  fmt::print(stderr, "  {:<22}{:>14.6g}\n", "condition number", r.condition_number);
  fmt::print(stderr,
             "note: estimates carry no bias correction; lambda_hat inherits kernel smoothing bias at "
             "this bandwidth.\n");
}

int cmd_estimate(const EstimateArgs& a) {
  require_file(a.outcome);
  require_file(a.adjacency);
  KernelSpec kernel;
  kernel.kind = parse_kernel_kind(a.kernel);
  kernel.gamma_rate = a.gamma_rate;

  const Sample sample = io::ingest_sample(a.outcome, a.adjacency);
  const CodegreeDistanceMatrix delta = distance_matrix_fast(sample.d);
  if (a.bandwidth) {
    kernel.bandwidth = *a.bandwidth;
  } else {
    kernel.bandwidth = select_bandwidth(delta, kernel.kind, kernel.gamma_rate, a.target_r).bandwidth;
  }
  kernel.validate();

  const EstimationResult result = estimate(sample, delta, kernel);
  OutputSet files;
  files.write(a.lambda_out, [&](std::ostream& o) { io::write_lambda_csv(o, result); });
  files.commit();
  std::cout << io::to_json(result).dump(2) << '\n';
  print_diagnostics(result);
  return kExitOk;
}

struct McArgs {
  fs::path config;
  fs::path out;
  std::optional<std::size_t> memory_budget_mb;
  bool timing = false;
};

int cmd_mc(const McArgs& a) {
  require_file(a.config);
  ExperimentConfig config = io::experiment_from_json(io::load_json(a.config));
  if (a.memory_budget_mb) config.memory_budget_mb = *a.memory_budget_mb;
  prepare_out_dir(a.out);

  const ExperimentReport report = run_experiment(config);
  OutputSet files;
  files.write(a.out / "raw.csv", [&](std::ostream& o) { io::write_raw_csv(o, report); });
  files.write(a.out / "aggregate.csv", [&](std::ostream& o) { io::write_aggregate_csv(o, report); });
  files.write(a.out / "summary.txt", [&](std::ostream& o) { io::write_summary(o, report, a.timing); });
  files.commit();
  io::write_summary(std::cout, report, a.timing);
  if (report.config_error) return kExitInput;
  return report.passed() ? kExitOk : kExitCheckFailed;
}

struct VerifyArgs {
  fs::path spec;
  std::string check = "lemma1";
  std::size_t pairs = 1000;
  std::size_t lattice = 0;
  std::size_t grid_size = kDefaultQuadratureNodes;
  std::size_t holder_resolution = kDefaultHolderResolution;
  std::uint64_t seed = 0;
  std::optional<fs::path> out;
};

int cmd_verify(const VerifyArgs& a) {
  require_file(a.spec);
  if (a.check != "lemma1" && a.check != "lemmaA1" && a.check != "holder") {
    throw ConfigError("unknown check '" + a.check + "' (expected lemma1, lemmaA1 or holder)");
  }
  const GraphonSpec spec = io::graphon_from_json(section(io::load_json(a.spec), "graphon"));

  if (a.check == "holder") {
    const auto constants = holder_constants(spec, a.holder_resolution);
    if (constants) {
      fmt::print("alpha={} C={}\n", io::format_double(constants->alpha()), io::format_double(constants->c()));
    } else {
      fmt::print("not certified\n");
    }
    return kExitOk;
  }

  std::vector<PointPair> pairs;
  if (a.lattice > 0) pairs = lattice_pairs(a.lattice);
  const auto random = random_pairs(a.pairs, a.seed);
  pairs.insert(pairs.end(), random.begin(), random.end());
  const QuadratureGrid grid = default_grid(spec, a.grid_size);

  LemmaReport report;
  if (a.check == "lemma1") {
    report = verify_lemma1(spec, pairs, grid);
  } else {
    std::optional<HolderConstants> constants;
    if (!spec.piecewise_constant()) constants = holder_constants(spec, a.holder_resolution);
    report = verify_lemmaA1(spec, constants, pairs, grid);
  }

  if (a.out) {
    OutputSet files;
    files.write(*a.out, [&](std::ostream& o) { io::write_lemma_report_csv(o, report); });
    files.commit();
  }
  if (!report.certified) {
    fmt::print(stderr, "warning: Hoelder constants not certified for {}; {} not checked\n", spec.kind(), a.check);
    fmt::print("{} {}: not certified\n", a.check, spec.kind());
    return kExitOk;
  }

  const std::size_t violations = report.violations();
  fmt::print("{} {}: {} pairs, {} violations\n", a.check, spec.kind(), report.rows.size(), violations);
  if (report.constants) {
    fmt::print("constants: alpha={} C={}\n", io::format_double(report.constants->alpha()),
               io::format_double(report.constants->c()));
  }
  const auto q = report.tightness_quantiles();
  if (!q.empty()) {
    fmt::print("delta/d quantiles: {} {} {} {} {}\n", io::format_double(q[0]), io::format_double(q[1]),
               io::format_double(q[2]), io::format_double(q[3]), io::format_double(q[4]));
  }
  for (const auto& r : report.rows) {
    if (!r.pass) {
      fmt::print(stderr, "violation pair {}: u={} v={} delta={} d={} bound={}\n", r.index, io::format_double(r.u),
                 io::format_double(r.v), io::format_double(r.delta), io::format_double(r.d),
                 io::format_double(r.bound));
    }
  }
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SingularSystemError& e) {
    fmt::print(stderr, "numerical error: {}\nhint: raise --bandwidth so more pairs carry weight\n", e.what());
    return kExitNumerical;
  } catch (const TargetUnreachableError& e) {
    fmt::print(stderr, "numerical error: {}\nhint: lower --target-r or pass --bandwidth\n", e.what());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return kExitNumerical;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "input error ({}): {}\n", to_string(e.kind()), e.what());
    return kExitInput;
  } catch (const Error& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network regression with codegree kernel matching"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", fmt::format("netreg {} (rng {})", NETREG_VERSION, rng::kAlgorithm));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a graphon and outcome model");
  simulate->add_option("--config", sim.config, "JSON with 'graphon' and 'outcome'")->required();
  simulate->add_option("--n", sim.n, "Number of agents")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_flag("--emit-truth", sim.emit_truth, "Also write hidden w and lambda(w)");
  simulate->add_option("--adjacency-format", sim.adjacency_format, "dense or edges")
      ->check(CLI::IsMember({"dense", "edges"}));

  DistancesArgs dist;
  auto* distances = app.add_subcommand("distances", "Empirical codegree distance matrix");
  distances->add_option("--adjacency", dist.adjacency, "Adjacency CSV")->required();
  distances->add_option("--outcome", dist.outcome, "Outcome CSV (needed for edge lists)");
  distances->add_option("--out", dist.out, "Output CSV (default: stdout)");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate beta and lambda");
  estimate_cmd->add_option("--outcome", est.outcome, "Outcome CSV")->required();
  estimate_cmd->add_option("--adjacency", est.adjacency, "Adjacency CSV")->required();
  estimate_cmd->add_option("--kernel", est.kernel, "boxcar or smooth_bump");
  estimate_cmd->add_option("--bandwidth", est.bandwidth, "Bandwidth h (default: automatic)");
  estimate_cmd->add_option("--target-r", est.target_r, "Automatic bandwidth target for min r_hat");
  estimate_cmd->add_option("--gamma-rate", est.gamma_rate, "Rate exponent of the diagnostic threshold");
  estimate_cmd->add_option("--lambda-out", est.lambda_out, "lambda_hat CSV path");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo experiment");
  mc_cmd->add_option("--config", mc.config, "Experiment JSON")->required();
  mc_cmd->add_option("--out", mc.out, "Output directory")->required();
  mc_cmd->add_option("--memory-budget-mb", mc.memory_budget_mb, "Caps concurrent replications");
  mc_cmd->add_flag("--timing", mc.timing, "Report runtime (output is then not reproducible)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check distance inequalities on a graphon");
  verify->add_option("--spec", ver.spec, "Graphon JSON")->required();
  verify->add_option("--check", ver.check, "lemma1, lemmaA1 or holder");
  verify->add_option("--pairs", ver.pairs, "Random pairs");
  verify->add_option("--lattice", ver.lattice, "Lattice side k (k*k pairs, 0 = none)");
  verify->add_option("--grid-size", ver.grid_size, "Minimum quadrature nodes");
  verify->add_option("--holder-resolution", ver.holder_resolution, "Grid used to certify (alpha, C)");
  verify->add_option("--seed", ver.seed, "Seed for random pairs");
  verify->add_option("--out", ver.out, "Report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (threads > 0) set_num_threads(threads);

  if (*simulate) return guarded([&] { return cmd_simulate(sim); });
  if (*distances) return guarded([&] { return cmd_distances(dist); });
  if (*estimate_cmd) return guarded([&] { return cmd_estimate(est); });
  if (*mc_cmd) return guarded([&] { return cmd_mc(mc); });
  return guarded([&] { return cmd_verify(ver); });
}
