// tailrisk: command-line front end for the CVaR estimation library.
//
// Exit codes: 0 on success, 2 on argument errors, 1 on runtime errors (the
// error name is printed on stderr).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailrisk/bandit.hpp"
#include "tailrisk/bounds.hpp"
#include "tailrisk/config.hpp"
#include "tailrisk/error.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/experiments.hpp"

namespace {

using namespace tailrisk;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `f`, turning library validation failures into usage errors. Used for
// everything that happens before any sampling.
template <class F>
auto checked(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct EstimatorFlags {
  std::string kind = "empirical";
  std::optional<double> p;
  std::optional<double> u;
  double delta = 0.01;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--estimator", kind, "CVaR estimator")
        ->check(CLI::IsMember({"empirical", "truncated", "gaussian-plugin"}))
        ->capture_default_str();
    cmd.add_option("--p", p, "moment order in (1, 2] (truncated estimator)");
    cmd.add_option("--u", u, "moment bound E|X|^p < u (truncated estimator)");
    cmd.add_option("--delta", delta, "confidence parameter in (0, 1) (truncated estimator)")->capture_default_str();
  }

  EstimatorSpec resolve(const CLI::App& cmd) const {
    if (kind != "truncated") {
      if (p || u || cmd.count("--delta") > 0) {
        throw UsageError("--p, --u and --delta only apply to --estimator truncated");
      }
      if (kind == "gaussian-plugin") return GaussianPluginEstimator{};
      return EmpiricalEstimator{};
    }
    if (!p || !u) throw UsageError("--estimator truncated needs --p and --u");
    const EstimatorSpec spec = TruncatedEstimator{*p, *u, delta};
    checked([&] { validate(spec); });
    return spec;
  }
};

void print(const json& j) { std::cout << dump_json(j) << '\n'; }

// ---- estimate ----------------------------------------------------------

struct EstimateCommand {
  std::string input;
  std::string format = "csv";
  double alpha = 0.0;
  EstimatorFlags estimator;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("estimate", "Estimate VaR and CVaR from a sample file");
    cmd->add_option("--input", input, "sample file")->required();
    cmd->add_option("--format", format, "input format: one-column csv or little-endian f64")
        ->check(CLI::IsMember({"csv", "f64"}))
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "risk level in (0, 1)")->required();
    estimator.add_to(*cmd);
    cmd->callback([this, cmd] { run(*cmd); });
  }

  void run(const CLI::App& cmd) const {
    const RiskLevel level = checked([&] { return RiskLevel(alpha); });
    const EstimatorSpec spec = estimator.resolve(cmd);
    std::vector<double> values = format == "csv" ? read_csv_column(input) : read_f64_stream(input);
    print(to_json(estimate(SampleBatch(std::move(values)), level, spec)));
  }
};

// ---- bound -------------------------------------------------------------

struct BoundCommand {
  std::string kind;
  std::optional<std::size_t> n;
  double eps = 0.0;
  double c = 1.0;
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<double> b;
  std::optional<double> v_alpha;
  std::optional<double> p;
  std::optional<double> G;
  bool solve_n = false;
  std::optional<double> target_delta;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("bound", "Evaluate or invert a concentration bound");
    cmd->add_option("--kind", kind, "var | light | heavy | simplified")
        ->check(CLI::IsMember({"var", "light", "heavy", "simplified"}))
        ->required();
    cmd->add_option("--n", n, "sample count");
    cmd->add_option("--eps", eps, "deviation eps > 0")->required();
    cmd->add_option("--c", c, "distribution-dependent constant (c, or c' when p = 2)")->capture_default_str();
    cmd->add_option("--alpha", alpha, "risk level (light, heavy, simplified)");
    cmd->add_option("--sigma", sigma, "MGF parameter sigma (light)");
    cmd->add_option("--b", b, "MGF parameter b (light)");
    cmd->add_option("--v-alpha", v_alpha, "VaR at alpha (light)");
    cmd->add_option("--p", p, "moment order in (1, 2] (heavy)");
    cmd->add_option("--G", G, "constant G (simplified)");
    cmd->add_flag("--solve-n", solve_n, "print the smallest n with bound <= --target-delta");
    cmd->add_option("--target-delta", target_delta, "target probability for --solve-n");
    cmd->callback([this] { run(); });
  }

  static double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string("--kind needs ") + flag);
    return *v;
  }

  BoundSpec spec() const {
    if (kind == "var") return VarBoundParams{c};
    const RiskLevel level = checked([&] { return RiskLevel(need(alpha, "--alpha")); });
    if (kind == "light") {
      return LightBoundParams{need(sigma, "--sigma"), need(b, "--b"), need(v_alpha, "--v-alpha"), c, level};
    }
    if (kind == "heavy") return HeavyBoundParams{need(p, "--p"), c, level};
    return SimplifiedBoundParams{level, need(G, "--G")};
  }

  void run() const {
    const BoundSpec bound = spec();
    checked([&] { validate(bound); });
    if (!(eps > 0.0)) throw UsageError("--eps must be > 0");
    if (solve_n) {
      if (!target_delta || !(*target_delta > 0.0)) throw UsageError("--solve-n needs --target-delta > 0");
      print(json{{"n", invert_for_n(eps, *target_delta, bound)}});
      return;
    }
    if (!n || *n == 0) throw UsageError("--n must be >= 1");
    const BoundValue value = evaluate_bound(bound, *n, eps);
    print(json{{"bound", value.probability_bound}, {"regime", regime_name(value.regime)}});
  }
};

// ---- bandit ------------------------------------------------------------

struct BanditCommand {
  std::string env_path;
  std::size_t budget = 0;
  std::string algorithm = "sr";
  EstimatorFlags estimator;
  std::uint64_t seed = 0;
  std::size_t reps = 1;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("bandit", "Run CVaR successive rejects (or uniform allocation)");
    cmd->add_option("--env", env_path, "JSON file {\"arms\": [...], \"alpha\": a}")->required();
    cmd->add_option("--budget", budget, "total number of pulls")->required();
    cmd->add_option("--algorithm", algorithm, "sr | uniform")
        ->check(CLI::IsMember({"sr", "uniform"}))
        ->capture_default_str();
    estimator.add_to(*cmd);
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_option("--reps", reps, "independent runs")->capture_default_str();
    cmd->callback([this, cmd] { run(*cmd); });
  }

  void run(const CLI::App& cmd) const {
    const EstimatorSpec spec = estimator.resolve(cmd);
    if (reps == 0) throw UsageError("--reps must be >= 1");
    const BanditEnv env = bandit_env_from_json(load_json(env_path));
    const std::size_t best = env.best_arm();

    std::size_t errors = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t run_seed = derive_seed(seed, {hash_label("bandit"), r});
      const BanditRun result = algorithm == "sr" ? run_cvar_sr(env, budget, spec, run_seed)
                                                 : run_uniform(env, budget, spec, run_seed);
      if (result.recommendation != best) ++errors;
      json line = to_json(result);
      line["rep"] = r;
      line["seed"] = run_seed;
      print(line);
    }
    json summary{{"misid_rate", static_cast<double>(errors) / static_cast<double>(reps)},
                 {"reps", reps},
                 {"best_arm", best},
                 {"algorithm", algorithm},
                 {"hardness_convention", "gap[1] := gap[2]"}};
    try {
      summary["H"] = hardness_H(GapProfile::from_cvars(env.true_cvars()));
    } catch (const Error&) {
      summary["H"] = nullptr;
    }
    print(summary);
  }
};

// ---- experiment --------------------------------------------------------

struct ExperimentCommand {
  std::string config_path;
  std::string out;
  std::string format = "csv";
  std::optional<std::size_t> threads;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("experiment", "Run a Monte Carlo sweep and write the curve to a file");
    cmd->add_option("--config", config_path, "JSON config with \"kind\": \"deviation\" or \"misid\"")->required();
    cmd->add_option("--out", out, "output file")->required();
    cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (default: TAILRISK_THREADS, else all cores)");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const json config = load_json(config_path);
    const std::string kind = config.value("kind", std::string());
    const ResultFormat fmt = format == "csv" ? ResultFormat::Csv : ResultFormat::Json;
    const std::size_t workers = resolve_threads(threads);
    json summary{{"out", out}, {"kind", kind}};
    if (kind == "deviation") {
      const DeviationConfig cfg = checked([&] { return deviation_config_from_json(config); });
      const TailCurve curve = deviation_curve(cfg, workers);
      write_results(curve, out, fmt);
      summary["points"] = curve.points.size();
      if (curve.points.size() >= 3) {
        const DecayFit fit = fit_decay_rate(curve);
        summary["decay_slope"] = fit.slope;
        summary["r_squared"] = fit.r_squared;
      }
    } else if (kind == "misid") {
      const MisidConfig cfg = checked([&] { return misid_config_from_json(config); });
      const ErrorCurve curve = misid_curve(cfg, workers);
      write_results(curve, out, fmt);
      summary["points"] = curve.points.size();
    } else {
      throw UsageError("config \"kind\" must be \"deviation\" or \"misid\"");
    }
    print(summary);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tailrisk: CVaR estimation, concentration bounds and CVaR best-arm identification"};
  app.require_subcommand(1);
  EstimateCommand estimate_cmd;
  BoundCommand bound_cmd;
  BanditCommand bandit_cmd;
  ExperimentCommand experiment_cmd;
  estimate_cmd.add_to(app);
  bound_cmd.add_to(app);
  bandit_cmd.add_to(app);
  experiment_cmd.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const tailrisk::Error& e) {
    std::cerr << e.name() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
