#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tailrisk/bounds.hpp"
#include "tailrisk/error.hpp"

using namespace tailrisk;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a tailrisk::Error");
  return ErrorKind::InvalidArgument;
}

// sigma^2 + v^2 = 1, b = 1, alpha = 0.5, c = 1: threshold 2.
LightBoundParams unit_light() { return {1.0, 1.0, 0.0, 1.0, RiskLevel(0.5)}; }

std::vector<BoundSpec> sample_specs() {
  return {VarBoundParams{1.0},
          VarBoundParams{0.3},
          unit_light(),
          LightBoundParams{0.5, 2.0, 1.2, 0.7, RiskLevel(0.9)},
          HeavyBoundParams{2.0, 1.0, RiskLevel(0.5)},
          HeavyBoundParams{1.5, 0.8, RiskLevel(0.9)},
          HeavyBoundParams{1.2, 2.0, RiskLevel(0.95)},
          SimplifiedBoundParams{RiskLevel(0.5), 0.25},
          SimplifiedBoundParams{RiskLevel(0.99), 0.05}};
}

// Strict decrease, except where the exponent is below double resolution
// next to the leading constant (at most log 8).
void check_step(double log_bound, double prev) {
  CHECK(log_bound <= prev);
  if (std::log(8.0) - log_bound > 1e-10) CHECK(log_bound < prev);
}

}  // namespace

TEST_SUITE("var_bound") {
  TEST_CASE("worked values") {
    const auto v = var_bound(100, 0.1, 1.0);
    CHECK(v.probability_bound == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(v.regime == Regime::NotApplicable);
    CHECK(var_bound(5, 1e-9, 1.0).probability_bound == 1.0);
    const auto tiny = var_bound(1000000, 0.1, 1.0);
    CHECK(tiny.probability_bound < 1e-300);
    CHECK(tiny.log_bound == doctest::Approx(std::log(2.0) - 20000.0).epsilon(1e-12));
  }

  TEST_CASE("argument checks") {
    CHECK(kind_of([] { var_bound(0, 0.1, 1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { var_bound(10, 0.0, 1.0); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { var_bound(10, 0.1, -1.0); }) == ErrorKind::InvalidArgument);
  }
}

TEST_SUITE("cvar_bound_light") {
  TEST_CASE("small-epsilon branch") {
    const auto p = unit_light();
    CHECK(p.threshold() == 2.0);
    const auto v = cvar_bound_light(100, 1.0, p);
    CHECK(v.regime == Regime::SmallEpsilon);
    CHECK(v.probability_bound == doctest::Approx(6.0 * std::exp(-12.5)).epsilon(1e-12));
  }

  TEST_CASE("large-epsilon branch") {
    const auto v = cvar_bound_light(100, 4.0, unit_light());
    CHECK(v.regime == Regime::LargeEpsilon);
    const double expected = 2.0 * std::exp(-50.0) + 6.0 * std::exp(-400.0);
    CHECK(v.probability_bound == doctest::Approx(expected).epsilon(1e-12));
    CHECK(v.log_bound == doctest::Approx(std::log(expected)).epsilon(1e-12));
  }

  TEST_CASE("threshold is inclusive") {
    const auto at = cvar_bound_light(100, 2.0, unit_light());
    CHECK(at.regime == Regime::SmallEpsilon);
    CHECK(at.log_bound == doctest::Approx(std::log(6.0) - 100.0 * 4.0 * 0.25 / 2.0).epsilon(1e-14));
    CHECK(cvar_bound_light(100, std::nextafter(2.0, 3.0), unit_light()).regime == Regime::LargeEpsilon);
  }

  TEST_CASE("regime flips exactly once on an increasing sweep") {
    const LightBoundParams p{0.5, 2.0, 1.2, 0.7, RiskLevel(0.9)};
    int flips = 0;
    Regime prev = Regime::SmallEpsilon;
    for (int k = 1; k <= 4000; ++k) {
      const double eps = k * p.threshold() / 1000.0;
      const Regime r = cvar_bound_light(50, eps, p).regime;
      if (r != prev) ++flips;
      CHECK(r == (eps <= p.threshold() ? Regime::SmallEpsilon : Regime::LargeEpsilon));
      prev = r;
    }
    CHECK(flips == 1);
  }

  TEST_CASE("argument checks") {
    CHECK(kind_of([] { cvar_bound_light(10, 1.0, LightBoundParams{1.0, 0.0, 0.0, 1.0, RiskLevel(0.5)}); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([] { cvar_bound_light(10, 1.0, LightBoundParams{0.0, 1.0, 0.0, 1.0, RiskLevel(0.5)}); }) ==
          ErrorKind::InvalidArgument);
  }
}

TEST_SUITE("cvar_bound_heavy") {
  TEST_CASE("case p = 2") {
    const auto v = cvar_bound_heavy(100, 0.4, HeavyBoundParams{2.0, 1.0, RiskLevel(0.5)});
    CHECK(v.probability_bound == doctest::Approx(8.0 * std::exp(-4.0)).epsilon(1e-12));
  }

  TEST_CASE("case p < 2 uses power p / (p - 1)") {
    const auto v = cvar_bound_heavy(100, 0.5, HeavyBoundParams{1.5, 1.0, RiskLevel(0.5)});
    CHECK(v.probability_bound == 1.0);  // 8 e^{-1.5625} > 1
    CHECK(v.log_bound == doctest::Approx(std::log(8.0) - 1.5625).epsilon(1e-12));
    const auto w = cvar_bound_heavy(1000, 0.5, HeavyBoundParams{1.5, 1.0, RiskLevel(0.5)});
    CHECK(w.probability_bound == doctest::Approx(8.0 * std::exp(-15.625)).epsilon(1e-12));
  }

  TEST_CASE("p = 2 is the limit of case (i)") {
    const double eps = 0.7;
    const std::size_t n = 300;
    const auto exponent = [&](double p) {
      return std::log(8.0) - cvar_bound_heavy(n, eps, HeavyBoundParams{p, 1.0, RiskLevel(0.8)}).log_bound;
    };
    CHECK(exponent(2.0 - 1e-6) == doctest::Approx(exponent(2.0)).epsilon(1e-4));
  }

  TEST_CASE("clip for vanishing eps") {
    CHECK(cvar_bound_heavy(1, 1e-12, HeavyBoundParams{1.3, 1.0, RiskLevel(0.9)}).probability_bound == 1.0);
  }

  TEST_CASE("argument checks") {
    CHECK(kind_of([] { cvar_bound_heavy(10, 1.0, HeavyBoundParams{1.0, 1.0, RiskLevel(0.5)}); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([] { cvar_bound_heavy(10, 1.0, HeavyBoundParams{2.1, 1.0, RiskLevel(0.5)}); }) ==
          ErrorKind::InvalidArgument);
  }
}

TEST_SUITE("simplified") {
  TEST_CASE("worked values") {
    CHECK(simplified_light_bound(100, 1.0, RiskLevel(0.5), 0.1).probability_bound ==
          doctest::Approx(8.0 * std::exp(-5.0)).epsilon(1e-12));
    // eps < 1 uses eps^2, eps > 1 uses eps.
    CHECK(simplified_light_bound(100, 0.5, RiskLevel(0.5), 0.1).log_bound ==
          doctest::Approx(std::log(8.0) - 100 * 0.5 * 0.25 * 0.1).epsilon(1e-14));
    CHECK(simplified_light_bound(100, 2.0, RiskLevel(0.5), 0.1).log_bound ==
          doctest::Approx(std::log(8.0) - 100 * 0.5 * 2.0 * 0.1).epsilon(1e-14));
  }

  TEST_CASE("constant G") {
    CHECK(constant_G(unit_light()) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(constant_G(LightBoundParams{1.0, 1e9, 0.0, 1.0, RiskLevel(0.5)}) ==
          doctest::Approx(2.5e-10).epsilon(1e-15));
    CHECK(constant_G(LightBoundParams{1.0, 3.0, 0.0, 1e6, RiskLevel(0.5)}) ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-15));
  }
}

TEST_SUITE("monotonicity") {
  TEST_CASE("light bound can jump up at the threshold") {
    const auto p = unit_light();
    const auto below = cvar_bound_light(100, 2.0, p);
    const auto above = cvar_bound_light(100, std::nextafter(2.0, 3.0), p);
    CHECK(below.log_bound == doctest::Approx(std::log(6.0) - 50.0).epsilon(1e-14));
    CHECK(above.log_bound == doctest::Approx(std::log(2.0) - 25.0).epsilon(1e-9));
  }

  TEST_CASE("non-increasing in n and eps, strictly before clipping") {
    for (const auto& spec : sample_specs()) {
      for (double eps : {0.01, 0.1, 0.5, 1.0, 3.0}) {
        double prev = INFINITY;
        for (std::size_t n = 1; n <= 5000; n += 37) {
          const auto v = evaluate_bound(spec, n, eps);
          check_step(v.log_bound, prev);
          prev = v.log_bound;
        }
      }
      for (std::size_t n : {1u, 10u, 100u, 1000u}) {
        double prev = INFINITY;
        double prev_prob = 1.0;
        Regime regime = Regime::SmallEpsilon;
        for (int k = 1; k <= 300; ++k) {
          const auto v = evaluate_bound(spec, n, 0.01 * k);
          // The light bound switches formula at its threshold and may jump there.
          if (v.regime == Regime::LargeEpsilon && regime == Regime::SmallEpsilon) {
            prev = INFINITY;
            prev_prob = 1.0;
          }
          regime = v.regime;
          check_step(v.log_bound, prev);
          CHECK(v.probability_bound <= prev_prob);
          CHECK(v.probability_bound >= 0.0);
          CHECK(v.probability_bound <= 1.0);
          prev = v.log_bound;
          prev_prob = v.probability_bound;
        }
      }
    }
  }
}

TEST_SUITE("invert_for_n") {
  TEST_CASE("worked inversions") {
    CHECK(invert_for_n(0.1, 2.0 * std::exp(-2.0), VarBoundParams{1.0}) == 100);
    CHECK(invert_for_n(1.0, 8.0 * std::exp(-5.0), SimplifiedBoundParams{RiskLevel(0.5), 0.25}) == 40);
    for (const auto& spec : sample_specs()) {
      CHECK(invert_for_n(0.3, 1.0, spec) == 1);
      CHECK(invert_for_n(0.3, 5.0, spec) == 1);
    }
  }

  TEST_CASE("argument checks") {
    CHECK(kind_of([] { invert_for_n(0.0, 0.1, VarBoundParams{}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { invert_for_n(0.1, 0.0, VarBoundParams{}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { invert_for_n(1e-200, 1e-10, VarBoundParams{}); }) == ErrorKind::Unachievable);
  }

  TEST_CASE("random round trips") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
      const RiskLevel alpha(0.5 + 0.49 * unit(gen));
      const double c = 0.1 + 2.0 * unit(gen);
      BoundSpec spec;
      switch (trial % 4) {
        case 0: spec = VarBoundParams{c}; break;
        case 1: spec = LightBoundParams{0.2 + unit(gen), 0.2 + 2.0 * unit(gen), 3.0 * unit(gen), c, alpha}; break;
        case 2: spec = HeavyBoundParams{1.1 + 0.9 * unit(gen), c, alpha}; break;
        default: spec = SimplifiedBoundParams{alpha, 0.01 + unit(gen)}; break;
      }
      const double eps = 0.05 + 2.0 * unit(gen);
      const double delta = std::exp(-1.0 - 20.0 * unit(gen));
      const std::size_t n = invert_for_n(eps, delta, spec);
      CAPTURE(trial);
      CHECK(evaluate_bound(spec, n, eps).probability_bound <= delta * (1.0 + 1e-10));
      if (n > 1) CHECK(evaluate_bound(spec, n - 1, eps).probability_bound > delta);
    }
  }
}
