#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rmtlab/equilibrium.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/orthopoly.hpp"
#include "rmtlab/quadrature.hpp"
#include "rmtlab/recurrence_cache.hpp"

using namespace rmtlab;
using std::numbers::pi;

namespace {

const Potential kGauss({0.0, 0.0, 0.5});
const Potential kQuartic = quartic_family(1.0, -2.0).potential();

// Independent fine rule for integrals over the real line, wider than the
// build interval.
QuadratureRule fine_rule(double R) { return composite_gauss_legendre(400, 20, -R, R); }

double direct_sum(const RecurrenceTable& tab, const Potential& p, int n, double x, double y) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += eval_weighted_poly(tab, p, k, x) * eval_weighted_poly(tab, p, k, y);
  return acc;
}

}  // namespace

TEST_CASE("Hermite recurrence: beta_k = k / N, alpha_k = 0") {
  for (double N : {1.0, 2.5, 40.0}) {
    const auto tab = build_recurrence(kGauss, N, 60);
    CHECK(tab.beta[0] == doctest::Approx(std::sqrt(2 * pi / N)).epsilon(1e-13));
    for (int k = 1; k <= 60; ++k) {
      CHECK(tab.beta[k] == doctest::Approx(k / N).epsilon(1e-12));
      CHECK(std::abs(tab.alpha[k - 1]) < 1e-12 * std::sqrt(tab.beta[k]));
    }
  }
}

TEST_CASE("Hermite recurrence stays exact at large degree and large N") {
  const int n = 200;
  const auto tab = build_recurrence(kGauss, n, n);
  for (int k = 1; k <= n; ++k) CHECK(tab.beta[k] == doctest::Approx(static_cast<double>(k) / n).epsilon(1e-11));
}

TEST_CASE("even quartic weight has vanishing alpha_k") {
  const auto tab = build_recurrence(kQuartic, 20.0, 40);
  for (int k = 0; k <= 40; ++k) CHECK(std::abs(tab.alpha[k]) < 1e-12 * std::sqrt(tab.beta[std::max(k, 1)]));
  for (double b : tab.beta) CHECK(b > 0.0);
}

TEST_CASE("weighted polynomials") {
  const Potential x2({0.0, 0.0, 1.0});
  const auto tab = build_recurrence(x2, 1.0, 10);
  CHECK(eval_weighted_poly(tab, x2, 0, 0.0) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-13));
  CHECK(eval_weighted_poly(tab, x2, 0, 0.7) ==
        doctest::Approx(std::exp(-0.49 / 2) / std::sqrt(std::sqrt(pi))).epsilon(1e-13));
  CHECK_THROWS_AS(eval_weighted_poly(tab, x2, 11, 0.0), IndexError);

  // Orthonormality by an independent quadrature.
  const auto qt = build_recurrence(kQuartic, 30.0, 30);
  const auto rule = fine_rule(4.0);
  for (int j : {0, 3, 17, 30})
    for (int k : {0, 3, 18, 30}) {
      const double ip = rule.integrate(
          [&](double x) { return eval_weighted_poly(qt, kQuartic, j, x) * eval_weighted_poly(qt, kQuartic, k, x); });
      CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("weighted recurrence does not overflow for large N V") {
  const auto tab = build_recurrence(kQuartic, 400.0, 50);
  const double v = eval_weighted_poly(tab, kQuartic, 50, 3.0);
  CHECK(std::isfinite(v));
  CHECK(std::isfinite(cd_kernel(tab, kQuartic, 50, 0.1, 0.2)));
}

TEST_CASE("CD kernel basics") {
  const Potential x2({0.0, 0.0, 1.0});
  const auto tab = build_recurrence(x2, 1.0, 5);
  CHECK(cd_kernel(tab, x2, 1, 0.0, 0.0) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-12));
  CHECK(cd_kernel(tab, x2, 1, 0.3, -0.4) ==
        doctest::Approx(eval_weighted_poly(tab, x2, 0, 0.3) * eval_weighted_poly(tab, x2, 0, -0.4)).epsilon(1e-12));
  CHECK_THROWS_AS(cd_kernel(tab, x2, 0, 0.0, 0.0), IndexError);
  CHECK_THROWS_AS(cd_kernel(tab, x2, 6, 0.0, 0.0), IndexError);

  const auto qt = build_recurrence(kQuartic, 20.0, 20);
  for (double x : {-1.3, 0.0, 0.4})
    for (double y : {-0.2, 0.9, 2.1}) CHECK(cd_kernel(qt, kQuartic, 20, x, y) == cd_kernel(qt, kQuartic, 20, y, x));
}

TEST_CASE("CD form equals the direct sum for n <= 20") {
  for (const Potential* p : {&kGauss, &kQuartic}) {
    const auto tab = build_recurrence(*p, 20.0, 20);
    for (int n = 1; n <= 20; n += 3)
      for (double x : {-1.7, -0.5, 0.0, 0.3, 1.1})
        for (double y : {-1.2, 0.0, 0.3 + 1e-9, 0.8, 1.9}) {
          const double direct = direct_sum(tab, *p, n, x, y);
          const double cd = cd_kernel(tab, *p, n, x, y);
          CHECK(std::abs(cd - direct) <= 1e-8 * std::max(1.0, std::abs(direct)));
        }
  }
}

TEST_CASE("trace and positivity of the diagonal") {
  for (int n : {10, 40, 80}) {
    const auto tab = build_recurrence(kQuartic, n, n);
    const auto rule = fine_rule(tab.interval_radius);
    const double trace = rule.integrate([&](double x) {
      const double k = cd_kernel(tab, kQuartic, n, x, x);
      CHECK(k >= -1e-14);
      return k;
    });
    CHECK(std::abs(trace - n) < 1e-6 * n);
  }
}

TEST_CASE("reproducing property") {
  const int n = 12;
  const auto tab = build_recurrence(kQuartic, 15.0, n);
  const auto rule = fine_rule(tab.interval_radius);
  for (auto [x, y] : {std::pair{0.2, -0.7}, std::pair{1.1, 1.1}, std::pair{-1.5, 0.4}}) {
    const double lhs =
        rule.integrate([&](double z) { return cd_kernel(tab, kQuartic, n, x, z) * cd_kernel(tab, kQuartic, n, z, y); });
    CHECK(lhs == doctest::Approx(cd_kernel(tab, kQuartic, n, x, y)).epsilon(1e-9));
  }
}

TEST_CASE("normalized diagonal approaches the equilibrium density") {
  const int n = 80;
  for (const Potential* p : {&kGauss, &kQuartic}) {
    const auto tab = build_recurrence(*p, n, n);
    const auto em = solve_one_cut(*p, 1.0);
    // Average over a window to remove the O(1/n) oscillation.
    for (double x0 : {-1.2, -0.6, 0.9, 1.4}) {
      double avg = 0.0;
      const int m = 40;
      for (int i = 0; i < m; ++i) {
        const double x = x0 - 0.05 + 0.1 * (i + 0.5) / m;
        avg += cd_kernel(tab, *p, n, x, x) / n / m;
      }
      CHECK(std::abs(avg - em.density(x0)) < 1e-2);
    }
  }
}

TEST_CASE("node-count contract") {
  QuadratureConfig q;
  q.nodes = 100;
  CHECK_THROWS_AS(build_recurrence(kGauss, 1.0, 30, q), InvalidParameter);
  CHECK_THROWS_AS(build_recurrence(kGauss, -1.0, 3), InvalidParameter);
  CHECK_THROWS_AS(build_recurrence(kGauss, 1.0, 0), InvalidParameter);
}

TEST_CASE("too few effective nodes surfaces an instability error") {
  const std::vector<double> x{-1.0, -0.5, 0.0, 0.5, 1.0}, w{0.1, 0.2, 0.4, 0.2, 0.1};
  CHECK_NOTHROW(discrete_recurrence(x, w, 4));
  CHECK_THROWS_AS(discrete_recurrence(x, w, 8), InstabilityError);
  const auto tab = discrete_recurrence(x, w, 4);
  CHECK(tab.beta[0] == doctest::Approx(1.0));
  CHECK(std::abs(tab.alpha[0]) < 1e-15);
}

TEST_CASE("recurrence cache round trip and environment override") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rmtlab_cache_test";
  fs::remove_all(dir);
  ::setenv(kCacheDirEnv, dir.c_str(), 1);
  CHECK(RecurrenceCache::resolve_dir("elsewhere") == dir);
  ::unsetenv(kCacheDirEnv);
  CHECK(RecurrenceCache::resolve_dir("elsewhere") == fs::path("elsewhere"));

  const RecurrenceCache cache(dir);
  const auto built = cache.get_or_build(kQuartic, 17.5, 25);
  const std::string key = recurrence_key(kQuartic, 17.5, 25);
  CHECK(fs::exists(cache.path_for(key)));
  const auto loaded = cache.load(key);
  REQUIRE(loaded);
  CHECK(loaded->alpha == built.alpha);
  CHECK(loaded->beta == built.beta);
  CHECK(loaded->log_beta0 == built.log_beta0);
  CHECK_FALSE(cache.load(key + "x"));

  std::stringstream ss;
  write_recurrence(ss, "k1", built);
  CHECK_FALSE(read_recurrence(ss, "k2"));
  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(read_recurrence(bad, "k1"), IoError);
  fs::remove_all(dir);
}
