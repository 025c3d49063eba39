// Batch front door: experiment orchestration, seeding, sharded execution,
// and CSV / JSON-lines emission for the verification suites and studies.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isinglab/isinglab.hpp"

using nlohmann::json;
using namespace isinglab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

// Outputs are buffered and written in one shot, so a failed run leaves no
// partial file and the header can carry the total wall time.
class OutputBuffer {
 public:
  explicit OutputBuffer(std::string path) : path_(std::move(path)) {}

  std::ostringstream& body() { return body_; }

  void write(const json& resolved_config, double wall_time_s, bool csv) {
    std::ostringstream head;
    if (csv) {
      head << "# isinglab " << kVersion << "\n";
      head << "# config = " << resolved_config.dump() << "\n";
      head << "# wall_time_s = " << wall_time_s << "\n";
    } else {
      json header = {{"isinglab_header",
                      {{"version", kVersion}, {"config", resolved_config},
                       {"wall_time_s", wall_time_s}}}};
      head << header.dump() << "\n";
    }
    if (path_.empty() || path_ == "-") {
      std::cout << head.str() << body_.str();
      return;
    }
    std::ofstream f(path_);
    if (!f) throw std::invalid_argument("cannot open output file: " + path_);
    f << head.str() << body_.str();
  }

 private:
  std::string path_;
  std::ostringstream body_;
};

Kernel parse_kernel(const std::string& spec) {
  if (spec.empty() || spec == "zero") return Kernel::zero();
  json j;
  try {
    j = json::parse(spec);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("kernel spec is not valid JSON: ") + e.what());
  }
  return kernel_from_json(j);
}

json report_to_json(const InequalityReport& r) {
  return json{{"name", r.name},       {"instance", r.instance}, {"lhs", r.lhs},
              {"rhs", r.rhs},         {"slack", r.slack},       {"tolerance", r.tolerance},
              {"passed", r.passed},   {"status", r.status},     {"note", r.note}};
}

json estimate_to_json(const MCEstimate& e) {
  return json{{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples},
              {"seed", e.seed}};
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- verify -----------------------------------------------------------------

struct VerifyOptions {
  long long instances = 1000;
  long long lemma36_instances = 200;
  long long monotone_instances = 200;
  int l_max = 3;
  int lemma36_l_max = 6;
  double tolerance = 1e-10;
  std::string summary_path;
};

int run_verify(const VerifyOptions& opt, std::uint64_t seed, const std::string& out_path,
               const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);

  struct Group {
    std::string name;
    long long instances = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    long long failures = 0;
    long long hypothesis_violated = 0;
  };
  std::vector<Group> groups;
  auto absorb = [&](const std::vector<InequalityReport>& reports) {
    for (const auto& r : reports) {
      out.body() << report_to_json(r).dump() << "\n";
      auto it = std::find_if(groups.begin(), groups.end(),
                             [&](const Group& g) { return g.name == r.name; });
      if (it == groups.end()) {
        groups.push_back({r.name});
        it = groups.end() - 1;
      }
      ++it->instances;
      if (r.status == "hypothesis_violated") {
        ++it->hypothesis_violated;
        continue;
      }
      it->min_slack = std::min(it->min_slack, r.slack);
      if (!r.passed) ++it->failures;
    }
  };

  absorb(run_gks_suite(opt.instances, opt.l_max, seed, opt.tolerance));
  absorb(run_lemma36_suite(opt.lemma36_instances, opt.lemma36_l_max, seed, opt.tolerance));
  absorb(run_monotonicity_suite(opt.monotone_instances, opt.l_max, seed, opt.tolerance));
  {
    std::vector<InequalityReport> grid;
    for (const auto& cfg : default_corbound_grid()) grid.push_back(corbound_check(cfg));
    absorb(grid);
  }

  long long failures = 0;
  for (const auto& g : groups) failures += g.failures;

  out.write(config, elapsed_s(t0), /*csv=*/false);

  if (!opt.summary_path.empty()) {
    OutputBuffer summary(opt.summary_path);
    summary.body() << "name,instances,min_slack,failures\n";
    for (const auto& g : groups)
      summary.body() << g.name << "," << g.instances << "," << g.min_slack << "," << g.failures
                     << "\n";
    summary.write(config, elapsed_s(t0), /*csv=*/true);
  }

  std::cerr << "verify: " << (failures == 0 ? "all checks passed" : "FAILURES") << "\n";
  return failures == 0 ? kExitOk : kExitVerificationFailure;
}

// --- exact ------------------------------------------------------------------

struct ExactOptions {
  std::string op = "partition";
  int L = 2;
  double j = 1.0;
  std::vector<double> w;
  std::vector<int> sites;
  std::vector<int> spins;
  int i = 0;
  int k = 1;
};

int run_exact(const ExactOptions& opt, const std::string& out_path, const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);

  auto coupling = [&]() {
    if (!opt.w.empty()) return PairCoupling(opt.w);
    return PairCoupling::nearest_neighbor(opt.j);
  };

  json inputs = {{"op", opt.op}, {"L", opt.L}};
  double value = 0.0;
  if (opt.op == "energy") {
    std::vector<int8_t> spins(opt.spins.begin(), opt.spins.end());
    const SpinConfiguration cfg{Lattice(opt.L), spins};
    value = energy(cfg, pair_interaction(coupling(), opt.L));
    inputs["spins"] = opt.spins;
  } else if (opt.op == "partition") {
    value = partition_exact(pair_interaction(coupling(), opt.L), opt.L);
  } else if (opt.op == "expectation") {
    value = expectation_exact(pair_interaction(coupling(), opt.L), opt.L, opt.sites);
    inputs["sites"] = opt.sites;
  } else if (opt.op == "nn-partition") {
    value = nn_partition_closed(opt.j, opt.L);
    inputs["j"] = opt.j;
  } else if (opt.op == "nn-correlation") {
    value = nn_correlation_closed(opt.j, opt.sites);
    inputs["j"] = opt.j;
    inputs["sites"] = opt.sites;
  } else if (opt.op == "tm-correlation") {
    value = transfer_matrix_correlation(coupling(), opt.L, opt.i, opt.k);
    inputs["i"] = opt.i;
    inputs["k"] = opt.k;
  } else {
    throw std::invalid_argument("exact: unknown --op " + opt.op);
  }
  if (!opt.w.empty())
    inputs["w"] = opt.w;
  else
    inputs["j"] = opt.j;

  json record = {{"operation", opt.op},
                 {"inputs", inputs},
                 {"value", value},
                 {"log_value", value > 0.0 ? json(std::log(value)) : json(nullptr)}};
  out.body() << record.dump() << "\n";
  out.write(config, elapsed_s(t0), /*csv=*/false);
  return kExitOk;
}

// --- continuum-study ----------------------------------------------------------

struct StudyOptions {
  std::string quantity = "moment-nn";
  std::vector<double> deltas = {0.2, 0.1, 0.05};
  double T = 1.0;
  std::string kernel = "zero";
  std::vector<double> times = {-0.5, 0.5};
  long long samples = 100000;
  double epsilon_gap = 0.1;
  std::string method = "mc";
};

int run_study(const StudyOptions& opt, std::uint64_t seed, int shards,
              const std::string& out_path, const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);
  const Kernel W = parse_kernel(opt.kernel);
  const DiscreteMethod method =
      opt.method == "exact" ? DiscreteMethod::Exact : DiscreteMethod::ReweightedMC;

  out.body() << "delta,quantity,estimate,std_error,exact_reference_if_any\n";
  std::uint64_t task = 0;
  for (double delta : opt.deltas) {
    const ScalingParams params(delta, opt.T);
    const std::uint64_t task_seed = seed + task++;
    double estimate = 0.0, se = 0.0;
    std::string reference;

    if (opt.quantity == "moment-nn") {
      estimate = discrete_moment_nn(params, opt.times);
      std::ostringstream os;
      os << moment_closed(opt.times);
      reference = os.str();
    } else if (opt.quantity == "moment-full") {
      const auto est =
          discrete_moment_full(params, opt.times, W, method, opt.samples, task_seed, shards);
      estimate = est.value.mean;
      se = est.value.std_error;
      if (est.ess_warning)
        std::cerr << "warning: effective sample size " << est.ess << " below 100 at delta="
                  << delta << "\n";
      if (W.is_zero()) {
        std::ostringstream os;
        os << moment_closed(opt.times);
        reference = os.str();
      }
    } else if (opt.quantity == "susceptibility") {
      const auto est = susceptibility_discrete(params, W, method, opt.samples, task_seed, shards);
      estimate = est.value.mean;
      se = est.value.std_error;
      if (W.is_zero()) {
        std::ostringstream os;
        os << susceptibility_zero_kernel(opt.T);
        reference = os.str();
      }
    } else if (opt.quantity == "tightness") {
      const auto r = tightness_probability(params, opt.epsilon_gap, opt.samples, task_seed, shards);
      estimate = r.empirical_probability;
      se = r.empirical_std_error;
      std::ostringstream os;
      os << r.analytic_bound;
      reference = os.str();
    } else {
      throw std::invalid_argument("continuum-study: unknown --quantity " + opt.quantity);
    }

    out.body() << delta << "," << opt.quantity << "," << estimate << "," << se << ","
               << reference << "\n";
  }
  out.write(config, elapsed_s(t0), /*csv=*/true);
  return kExitOk;
}

// --- mc -----------------------------------------------------------------------

struct McOptions {
  std::string quantity = "susceptibility";
  std::string kernel = "zero";
  double T = 1.0;
  double mu = 0.0;
  double h = 0.01;
  long long samples = 100000;
  double intensity = 1.0;
};

int run_mc(const McOptions& opt, std::uint64_t seed, int shards, const std::string& out_path,
           const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);
  const Kernel W = parse_kernel(opt.kernel);

  json record = {{"quantity", opt.quantity}, {"W", to_json(W)},     {"T", opt.T},
                 {"mu", opt.mu},             {"samples", opt.samples}, {"seed", seed}};

  if (opt.quantity == "partition") {
    const auto e = mc_partition(W, opt.T, opt.samples, seed, shards, -1, opt.intensity);
    record["mean"] = e.mean;
    record["std_error"] = e.std_error;
  } else if (opt.quantity == "susceptibility") {
    const auto e = mc_susceptibility(W, opt.T, opt.samples, seed, shards, -1, opt.intensity);
    record["mean"] = e.value.mean;
    record["std_error"] = e.value.std_error;
    record["numerator"] = estimate_to_json(e.numerator);
    record["denominator"] = estimate_to_json(e.denominator);
  } else if (opt.quantity == "partition-field") {
    const auto e =
        mc_partition_with_field(W, opt.T, opt.mu, opt.samples, seed, shards, -1, opt.intensity);
    record["mean"] = e.mean;
    record["std_error"] = e.std_error;
  } else if (opt.quantity == "fd-susceptibility") {
    const auto e =
        fd_susceptibility(W, opt.T, opt.h, opt.samples, seed, shards, -1, opt.intensity);
    record["mean"] = e.value.mean;
    record["std_error"] = e.value.std_error;
    record["h"] = opt.h;
    record["first_difference"] = e.first_difference;
    record["first_difference_std_error"] = e.first_difference_std_error;
    record["cancellation_warning"] = e.cancellation_warning;
    if (e.cancellation_warning)
      std::cerr << "warning: finite difference below the floating-point noise floor\n";
  } else {
    throw std::invalid_argument("mc: unknown --quantity " + opt.quantity);
  }

  record["wall_time_s"] = elapsed_s(t0);
  out.body() << record.dump() << "\n";
  out.write(config, elapsed_s(t0), /*csv=*/false);
  return kExitOk;
}

// --- susceptibility-scan --------------------------------------------------------

struct ScanOptions {
  std::string kernel = "zero";
  std::vector<double> t_list = {1.0, 2.0, 5.0};
  long long samples = 100000;
  double intensity = 1.0;
};

int run_scan(const ScanOptions& opt, std::uint64_t seed, int shards, const std::string& out_path,
             const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);
  const Kernel W = parse_kernel(opt.kernel);
  out.body() << "T,estimate,std_error\n";
  std::uint64_t task = 0;
  for (double T : opt.t_list) {
    const auto e = mc_susceptibility(W, T, opt.samples, seed + task++, shards, -1, opt.intensity);
    out.body() << T << "," << e.value.mean << "," << e.value.std_error << "\n";
  }
  out.write(config, elapsed_s(t0), /*csv=*/true);
  return kExitOk;
}

// --- corbound -------------------------------------------------------------------

struct CorboundOptions {
  std::vector<double> w;
  double epsilon = 0.05;
  double D = 1.01;
  int L = 200;
  int N = 100;
  bool default_grid = false;
};

int run_corbound(const CorboundOptions& opt, const std::string& out_path, const json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  OutputBuffer out(out_path);
  std::vector<CorBoundConfig> configs;
  if (opt.default_grid) {
    configs = default_corbound_grid();
  } else {
    configs.push_back({PairCoupling(opt.w), opt.epsilon, opt.D, opt.N, opt.L});
  }
  long long failures = 0;
  for (const auto& cfg : configs) {
    const auto r = corbound_check(cfg);
    out.body() << report_to_json(r).dump() << "\n";
    if (r.status == "ok" && !r.passed) ++failures;
  }
  out.write(config, elapsed_s(t0), /*csv=*/false);
  return failures == 0 ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-dimensional long-range Ising / jump-process laboratory"};
  app.set_config("--config", "", "configuration file (INI, one section per command)");
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int shards = 1;
  std::string out_path = "-";
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--shards", shards, "number of independent sample shards")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", out_path, "output path ('-' = stdout)")->capture_default_str();

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "run the inequality verification suites");
  verify->add_option("--instances", vo.instances)->capture_default_str();
  verify->add_option("--lemma36-instances", vo.lemma36_instances)->capture_default_str();
  verify->add_option("--monotone-instances", vo.monotone_instances)->capture_default_str();
  verify->add_option("--l-max", vo.l_max)->capture_default_str();
  verify->add_option("--lemma36-l-max", vo.lemma36_l_max)->capture_default_str();
  verify->add_option("--tolerance", vo.tolerance)->capture_default_str();
  verify->add_option("--summary", vo.summary_path, "CSV summary path");

  ExactOptions eo;
  auto* exact = app.add_subcommand("exact", "closed-form / enumeration / transfer-matrix values");
  exact->add_option("--op", eo.op,
                    "energy|partition|expectation|nn-partition|nn-correlation|tm-correlation")
      ->capture_default_str();
  exact->add_option("--l", eo.L)->capture_default_str();
  exact->add_option("--j", eo.j)->capture_default_str();
  exact->add_option("--w", eo.w, "pair coupling by distance");
  exact->add_option("--sites", eo.sites);
  exact->add_option("--spins", eo.spins);
  exact->add_option("--i", eo.i)->capture_default_str();
  exact->add_option("--k", eo.k)->capture_default_str();

  StudyOptions so;
  auto* study = app.add_subcommand("continuum-study", "scaling studies over a delta list");
  study->add_option("--quantity", so.quantity, "moment-nn|moment-full|susceptibility|tightness")
      ->capture_default_str();
  study->add_option("--deltas", so.deltas)->capture_default_str();
  study->add_option("--t", so.T)->capture_default_str();
  study->add_option("--kernel", so.kernel, "kernel spec JSON or 'zero'")->capture_default_str();
  study->add_option("--times", so.times)->capture_default_str();
  study->add_option("--samples", so.samples)->capture_default_str();
  study->add_option("--epsilon-gap", so.epsilon_gap)->capture_default_str();
  study->add_option("--method", so.method, "exact|mc")->capture_default_str();

  McOptions mo;
  auto* mc = app.add_subcommand("mc", "jump-process Monte Carlo estimators");
  mc->add_option("--quantity", mo.quantity,
                 "partition|susceptibility|partition-field|fd-susceptibility")
      ->capture_default_str();
  mc->add_option("--kernel", mo.kernel)->capture_default_str();
  mc->add_option("--t", mo.T)->capture_default_str();
  mc->add_option("--mu", mo.mu)->capture_default_str();
  mc->add_option("--fd-step", mo.h, "finite-difference step h")->capture_default_str();
  mc->add_option("--samples", mo.samples)->capture_default_str();
  mc->add_option("--intensity", mo.intensity)->capture_default_str();

  ScanOptions sc;
  auto* scan = app.add_subcommand("susceptibility-scan", "susceptibility over a T list");
  scan->add_option("--kernel", sc.kernel)->capture_default_str();
  scan->add_option("--t-list", sc.t_list)->capture_default_str();
  scan->add_option("--samples", sc.samples)->capture_default_str();
  scan->add_option("--intensity", sc.intensity)->capture_default_str();

  CorboundOptions co;
  auto* cor = app.add_subcommand("corbound", "susceptibility-sum bound checks");
  cor->add_option("--w", co.w, "pair coupling by distance");
  cor->add_option("--epsilon", co.epsilon)->capture_default_str();
  cor->add_option("--d", co.D)->capture_default_str();
  cor->add_option("--l", co.L)->capture_default_str();
  cor->add_option("--n", co.N)->capture_default_str();
  cor->add_flag("--default-grid", co.default_grid, "run the documented coupling grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfigError;
  }

  json config = {{"seed", seed}, {"shards", shards}, {"out", out_path}};

  try {
    if (verify->parsed()) {
      config["command"] = "verify";
      config["instances"] = vo.instances;
      config["lemma36_instances"] = vo.lemma36_instances;
      config["tolerance"] = vo.tolerance;
      return run_verify(vo, seed, out_path, config);
    }
    if (exact->parsed()) {
      config["command"] = "exact";
      config["op"] = eo.op;
      return run_exact(eo, out_path, config);
    }
    if (study->parsed()) {
      config["command"] = "continuum-study";
      config["quantity"] = so.quantity;
      config["deltas"] = so.deltas;
      config["T"] = so.T;
      config["kernel"] = so.kernel;
      config["samples"] = so.samples;
      config["method"] = so.method;
      return run_study(so, seed, shards, out_path, config);
    }
    if (mc->parsed()) {
      config["command"] = "mc";
      config["quantity"] = mo.quantity;
      config["kernel"] = mo.kernel;
      config["T"] = mo.T;
      config["samples"] = mo.samples;
      return run_mc(mo, seed, shards, out_path, config);
    }
    if (scan->parsed()) {
      config["command"] = "susceptibility-scan";
      config["kernel"] = sc.kernel;
      config["t_list"] = sc.t_list;
      config["samples"] = sc.samples;
      return run_scan(sc, seed, shards, out_path, config);
    }
    if (cor->parsed()) {
      config["command"] = "corbound";
      return run_corbound(co, out_path, config);
    }
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const capacity_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}
