#include "tailrisk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "tailrisk/config.hpp"
#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr const char* kTheoryLabel = "parametric bound, constants user-chosen";

// Runs task(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown once all workers have stopped.
template <class Task>
void parallel_for(std::size_t count, std::size_t threads, Task task) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count && !abort; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        abort = true;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::size_t minimum_samples(const EstimatorSpec& estimator) {
  return std::holds_alternative<GaussianPluginEstimator>(estimator) ? 2 : 1;
}

void validate(const DeviationConfig& cfg) {
  if (cfg.reps == 0) fail(ErrorKind::InvalidArgument, "reps must be >= 1");
  if (!(cfg.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be > 0");
  if (cfg.n_grid.empty()) fail(ErrorKind::InvalidArgument, "n_grid is empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::size_t n = cfg.n_grid[i];
    if (i > 0 && n <= cfg.n_grid[i - 1]) fail(ErrorKind::InvalidArgument, "n_grid must be strictly increasing");
    if (tail_count(n, cfg.alpha) == 0 || n < minimum_samples(cfg.estimator)) {
      fail(ErrorKind::InsufficientSamples, "grid point n = " + std::to_string(n) + " is infeasible for alpha");
    }
  }
  tailrisk::validate(cfg.estimator);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IOFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorKind::IOFailure, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IOFailure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Rows of a four-column CSV with a header line.
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    const std::string& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header) {
    fail(ErrorKind::IOFailure, path.string() + ": expected header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) fail(ErrorKind::IOFailure, path.string() + ": malformed row '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(ErrorKind::IOFailure, "not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') fail(ErrorKind::IOFailure, "not a count: '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("TAILRISK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> deviation_estimates(const DeviationConfig& cfg, std::size_t threads) {
  validate(cfg);
  const std::size_t reps = cfg.reps;
  const std::uint64_t label = hash_label(cfg.name);
  std::vector<double> out(cfg.n_grid.size() * reps);
  parallel_for(out.size(), threads, [&](std::size_t task) {
    const std::size_t g = task / reps;
    const std::size_t r = task % reps;
    RandomStream stream = RandomStream::derived(cfg.seed, {label, g, r});
    SampleBatch batch(sample(cfg.dist, cfg.n_grid[g], stream));
    out[task] = estimate(batch, cfg.alpha, cfg.estimator).cvar_hat;
  });
  return out;
}

BoundSpec theory_bound_for(const DeviationConfig& cfg) {
  const double c = cfg.constants.c;
  if (const auto* t = std::get_if<TruncatedEstimator>(&cfg.estimator)) {
    return HeavyBoundParams{t->p, c, cfg.alpha};
  }
  return std::visit(overloaded{
                        [&](const LightTailed& light) -> BoundSpec {
                          return LightBoundParams{light.sigma, light.b, true_var(cfg.dist, cfg.alpha),
                                                  c, cfg.alpha};
                        },
                        [&](const BoundedMoment& heavy) -> BoundSpec {
                          return HeavyBoundParams{heavy.p, c, cfg.alpha};
                        },
                    },
                    tail_class(cfg.dist));
}

TailCurve deviation_curve(const DeviationConfig& cfg, std::size_t threads) {
  const double truth = true_cvar(cfg.dist, cfg.alpha);
  const auto estimates = deviation_estimates(cfg, threads);
  const BoundSpec theory = theory_bound_for(cfg);

  TailCurve curve;
  for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
    std::size_t deviating = 0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      if (std::abs(estimates[g * cfg.reps + r] - truth) > cfg.epsilon) ++deviating;
    }
    curve.points.push_back({cfg.n_grid[g],
                            static_cast<double>(deviating) / static_cast<double>(cfg.reps),
                            evaluate_bound(theory, cfg.n_grid[g], cfg.epsilon).probability_bound,
                            cfg.reps});
  }
  return curve;
}

ErrorCurve misid_curve(const MisidConfig& cfg, std::size_t threads) {
  if (cfg.reps == 0) fail(ErrorKind::InvalidArgument, "reps must be >= 1");
  if (cfg.budgets.empty()) fail(ErrorKind::InvalidArgument, "budgets are empty");
  tailrisk::validate(cfg.estimator);
  const BanditEnv env(cfg.arms, cfg.alpha);
  const auto cvars = env.true_cvars();
  const std::size_t best = env.best_arm();
  for (std::size_t i = 0; i < cvars.size(); ++i) {
    if (i != best && cvars[i] == cvars[best]) fail(ErrorKind::DegenerateGaps, "the best arm is not unique");
  }
  const double H = cfg.H ? *cfg.H : hardness_H(GapProfile::from_cvars(cvars));
  for (std::size_t budget : cfg.budgets) sr_schedule(env.size(), budget, cfg.alpha);

  const std::size_t reps = cfg.reps;
  const std::uint64_t label = hash_label(cfg.name);
  std::vector<char> wrong(cfg.budgets.size() * reps, 0);
  parallel_for(wrong.size(), threads, [&](std::size_t task) {
    const std::size_t b = task / reps;
    const std::size_t r = task % reps;
    const auto run = run_cvar_sr(env, cfg.budgets[b], cfg.estimator, derive_seed(cfg.seed, {label, b, r}));
    wrong[task] = run.recommendation != best ? 1 : 0;
  });

  ErrorCurve curve;
  for (std::size_t b = 0; b < cfg.budgets.size(); ++b) {
    const auto first = wrong.begin() + static_cast<std::ptrdiff_t>(b * reps);
    const auto errors = std::count(first, first + static_cast<std::ptrdiff_t>(reps), 1);
    curve.points.push_back({cfg.budgets[b], static_cast<double>(errors) / static_cast<double>(reps),
                            misid_upper_bound(env.size(), cfg.budgets[b], cfg.alpha, H, cfg.G_max), reps});
  }
  return curve;
}

DecayFit fit_decay_rate(const TailCurve& curve) {
  if (curve.points.size() < 3) fail(ErrorKind::TooFewPoints, "decay fit needs at least 3 points");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : curve.points) {
    double prob = pt.empirical_prob;
    if (prob <= 0.0 || prob >= 1.0) {
      const double count = std::round(prob * static_cast<double>(pt.reps));
      prob = (count + 1.0) / (static_cast<double>(pt.reps) + 2.0);
    }
    xs.push_back(static_cast<double>(pt.n));
    ys.push_back(std::log(prob));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "decay fit needs distinct n values");
  const double slope = sxy / sxx;
  // A flat curve is fitted exactly by the zero-slope line.
  const double r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, r_squared};
}

void write_results(const TailCurve& curve, const std::filesystem::path& path, ResultFormat format) {
  auto out = open_output(path);
  if (format == ResultFormat::Csv) {
    out << "n,empirical_prob,theory_bound,reps\n";
    for (const auto& pt : curve.points) {
      out << pt.n << ',' << format_double(pt.empirical_prob) << ',' << format_double(pt.theoretical_bound)
          << ',' << pt.reps << '\n';
    }
  } else {
    json j = to_json(curve);
    j["metadata"] = {{"theory_bound", kTheoryLabel}};
    out << dump_json(j) << '\n';
  }
  finish(out, path);
}

void write_results(const ErrorCurve& curve, const std::filesystem::path& path, ResultFormat format) {
  auto out = open_output(path);
  if (format == ResultFormat::Csv) {
    out << "budget,misid_rate,theory_bound,reps\n";
    for (const auto& pt : curve.points) {
      out << pt.budget << ',' << format_double(pt.misid_rate) << ',' << format_double(pt.theory_bound) << ','
          << pt.reps << '\n';
    }
  } else {
    json j = to_json(curve);
    j["metadata"] = {{"theory_bound", kTheoryLabel}};
    out << dump_json(j) << '\n';
  }
  finish(out, path);
}

TailCurve read_tail_curve(const std::filesystem::path& path, ResultFormat format) {
  if (format == ResultFormat::Json) return tail_curve_from_json(load_json(path));
  TailCurve curve;
  for (const auto& row : read_csv_rows(path, "n,empirical_prob,theory_bound,reps")) {
    curve.points.push_back({parse_count(row[0]), parse_double(row[1]), parse_double(row[2]), parse_count(row[3])});
  }
  return curve;
}

ErrorCurve read_error_curve(const std::filesystem::path& path, ResultFormat format) {
  if (format == ResultFormat::Json) return error_curve_from_json(load_json(path));
  ErrorCurve curve;
  for (const auto& row : read_csv_rows(path, "budget,misid_rate,theory_bound,reps")) {
    curve.points.push_back({parse_count(row[0]), parse_double(row[1]), parse_double(row[2]), parse_count(row[3])});
  }
  return curve;
}

}  // namespace tailrisk
