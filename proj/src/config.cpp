#include "tailrisk/config.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Wraps JSON access so schema violations surface as InvalidArgument.
template <class F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("invalid ") + what + ": " + e.what());
  }
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) fail(ErrorKind::InvalidArgument, std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

std::size_t count(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    fail(ErrorKind::InvalidArgument, std::string("field '") + key + "' must be a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

std::vector<std::size_t> counts(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    fail(ErrorKind::InvalidArgument, std::string("field '") + key + "' must be an array");
  }
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_unsigned()) fail(ErrorKind::InvalidArgument, std::string("'") + key + "' holds a non-count");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::uint64_t seed_of(const json& j) {
  if (!j.contains("seed")) return 0;
  if (!j.at("seed").is_number_unsigned()) fail(ErrorKind::InvalidArgument, "seed must be an unsigned integer");
  return j.at("seed").get<std::uint64_t>();
}

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += json(it.key()).dump();
        out += ": ";
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ", ";
        first = false;
        dump_into(v, out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

json to_json(const DistributionSpec& dist) {
  const json params = std::visit(
      overloaded{
          [](const Gaussian& g) { return json{{"mean", g.mean}, {"stddev", g.stddev}}; },
          [](const Exponential& e) { return json{{"mean", e.mean}}; },
          [](const Pareto& p) { return json{{"scale", p.scale}, {"shape", p.shape}}; },
          [](const Lognormal& l) { return json{{"mu", l.mu}, {"sigma", l.sigma}}; },
          [](const StudentT& t) { return json{{"dof", t.dof}, {"scale", t.scale}}; },
      },
      dist.family());
  return {{"family", dist.family_name()}, {"params", params}};
}

DistributionSpec distribution_from_json(const json& j) {
  return parsing("distribution", [&] {
    if (!j.is_object() || !j.contains("family")) fail(ErrorKind::InvalidArgument, "distribution needs a 'family'");
    const auto family = j.at("family").get<std::string>();
    const json params = j.value("params", json::object());
    if (family == "gaussian") {
      return DistributionSpec::gaussian(number_or(params, "mean", 0.0), number(params, "stddev"));
    }
    if (family == "exponential") return DistributionSpec::exponential(number(params, "mean"));
    if (family == "pareto") return DistributionSpec::pareto(number(params, "scale"), number(params, "shape"));
    if (family == "lognormal") return DistributionSpec::lognormal(number(params, "mu"), number(params, "sigma"));
    if (family == "student_t") {
      return DistributionSpec::student_t(number(params, "dof"), number_or(params, "scale", 1.0));
    }
    fail(ErrorKind::InvalidArgument, "unknown distribution family '" + family + "'");
  });
}

json to_json(const EstimatorSpec& spec) {
  return std::visit(overloaded{
                        [](const EmpiricalEstimator&) { return json{{"kind", "empirical"}}; },
                        [](const TruncatedEstimator& t) {
                          return json{{"kind", "truncated"}, {"p", t.p}, {"u", t.u}, {"delta", t.delta}};
                        },
                        [](const GaussianPluginEstimator&) { return json{{"kind", "gaussian-plugin"}}; },
                    },
                    spec);
}

EstimatorSpec estimator_from_json(const json& j) {
  return parsing("estimator", [&]() -> EstimatorSpec {
    const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
    EstimatorSpec spec;
    if (kind == "empirical") {
      spec = EmpiricalEstimator{};
    } else if (kind == "gaussian-plugin") {
      spec = GaussianPluginEstimator{};
    } else if (kind == "truncated") {
      if (!j.is_object()) fail(ErrorKind::InvalidArgument, "truncated estimator needs p and u");
      spec = TruncatedEstimator{number(j, "p"), number(j, "u"), number_or(j, "delta", 0.01)};
    } else {
      fail(ErrorKind::InvalidArgument, "unknown estimator '" + kind + "'");
    }
    validate(spec);
    return spec;
  });
}

json to_json(const RiskEstimate& estimate) {
  return {{"var_hat", estimate.var_hat},
          {"cvar_hat", estimate.cvar_hat},
          {"n", estimate.n},
          {"estimator", to_json(estimate.estimator)}};
}

json to_json(const BanditRun& run) {
  json eliminations = json::array();
  for (const auto& e : run.eliminations) {
    eliminations.push_back({{"phase", e.phase}, {"arm", e.arm}, {"cvar_estimate", e.cvar_estimate}});
  }
  return {{"recommendation", run.recommendation},
          {"pulls_per_arm", run.pulls_per_arm},
          {"eliminations", eliminations},
          {"final_estimates", run.final_estimates},
          {"total_pulls", run.total_pulls}};
}

json to_json(const TailCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"n", p.n},
                      {"empirical_prob", p.empirical_prob},
                      {"theoretical_bound", p.theoretical_bound},
                      {"reps", p.reps}});
  }
  return {{"points", points}};
}

json to_json(const ErrorCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back(
        {{"budget", p.budget}, {"misid_rate", p.misid_rate}, {"theory_bound", p.theory_bound}, {"reps", p.reps}});
  }
  return {{"points", points}};
}

TailCurve tail_curve_from_json(const json& j) {
  return parsing("tail curve", [&] {
    TailCurve curve;
    for (const auto& p : j.at("points")) {
      curve.points.push_back(
          {count(p, "n"), number(p, "empirical_prob"), number(p, "theoretical_bound"), count(p, "reps")});
    }
    return curve;
  });
}

ErrorCurve error_curve_from_json(const json& j) {
  return parsing("error curve", [&] {
    ErrorCurve curve;
    for (const auto& p : j.at("points")) {
      curve.points.push_back(
          {count(p, "budget"), number(p, "misid_rate"), number(p, "theory_bound"), count(p, "reps")});
    }
    return curve;
  });
}

BanditEnv bandit_env_from_json(const json& j) {
  return parsing("bandit environment", [&] {
    std::vector<DistributionSpec> arms;
    for (const auto& arm : j.at("arms")) arms.push_back(distribution_from_json(arm));
    return BanditEnv(std::move(arms), RiskLevel(number(j, "alpha")));
  });
}

DeviationConfig deviation_config_from_json(const json& j) {
  return parsing("deviation config", [&] {
    DeviationConfig cfg;
    cfg.name = j.value("name", std::string("deviation"));
    cfg.dist = distribution_from_json(j.at("dist"));
    cfg.alpha = RiskLevel(number(j, "alpha"));
    cfg.estimator = j.contains("estimator") ? estimator_from_json(j.at("estimator")) : EstimatorSpec{};
    cfg.epsilon = number(j, "epsilon");
    cfg.n_grid = counts(j, "n_grid");
    cfg.reps = count(j, "reps");
    cfg.seed = seed_of(j);
    if (j.contains("constants")) cfg.constants.c = number_or(j.at("constants"), "c", 1.0);
    return cfg;
  });
}

MisidConfig misid_config_from_json(const json& j) {
  return parsing("misid config", [&] {
    MisidConfig cfg;
    cfg.name = j.value("name", std::string("misid"));
    const BanditEnv env = bandit_env_from_json(j.at("env"));
    cfg.arms.assign(env.arms().begin(), env.arms().end());
    cfg.alpha = env.alpha();
    cfg.budgets = counts(j, "budgets");
    cfg.estimator = j.contains("estimator") ? estimator_from_json(j.at("estimator")) : EstimatorSpec{};
    cfg.reps = count(j, "reps");
    cfg.seed = seed_of(j);
    if (j.contains("theory")) {
      const auto& theory = j.at("theory");
      if (theory.contains("H")) cfg.H = number(theory, "H");
      cfg.G_max = number_or(theory, "G_max", 1.0);
    }
    return cfg;
  });
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IOFailure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
  }
}

std::vector<double> read_csv_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IOFailure, "cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    const std::string cell = line.substr(begin, end - begin + 1);
    char* stop = nullptr;
    const double v = std::strtod(cell.c_str(), &stop);
    if (stop == cell.c_str() || *stop != '\0') {
      if (first && values.empty()) {
        first = false;
        continue;
      }
      fail(ErrorKind::InvalidArgument, path.string() + ": not a number: '" + cell + "'");
    }
    first = false;
    values.push_back(v);
  }
  return values;
}

std::vector<double> read_f64_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IOFailure, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) fail(ErrorKind::InvalidArgument, path.string() + ": size is not a multiple of 8");
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void write_f64_stream(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IOFailure, "cannot open " + path.string() + " for writing");
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      out.put(static_cast<char>(bits & 0xff));
      bits >>= 8;
    }
  }
  if (!out) fail(ErrorKind::IOFailure, "failed writing " + path.string());
}

}  // namespace tailrisk
