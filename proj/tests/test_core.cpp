#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rabi/common.hpp"
#include "rabi/polynomial.hpp"
#include "rabi/root_finding.hpp"

using namespace rabi;

TEST_CASE("pole energies, one-photon") {
  ModelParams p{1.0, 1.5, 0.4, 0.0};
  // kind A, m = 0, g = 0: E = eps/2
  CHECK(pole_energy({Model::one_photon, PoleKind::A, 0}, p) ==
        Catch::Approx(0.2).margin(1e-15));

  // overlapped lines: eps = (M-N) omega makes A(N) and B(M) coincide
  const int N = 1, M = 3;
  ModelParams po{1.0, 1.5, (M - N) * 1.0, 0.7};
  const double ea = pole_energy({Model::one_photon, PoleKind::A, N}, po);
  const double eb = pole_energy({Model::one_photon, PoleKind::B, M}, po);
  CHECK(ea == Catch::Approx(eb).margin(1e-14));
  CHECK(ea == Catch::Approx(0.5 * (M + N) * po.omega - po.g * po.g / po.omega)
                  .margin(1e-14));
}

TEST_CASE("pole energies, two-photon") {
  // approaching collapse, kind A squeezes onto (eps - omega)/2
  for (double g : {0.49, 0.499, 0.49999}) {
    ModelParams p{1.0, 2.0, 0.3, g};
    const double e = pole_energy({Model::two_photon, PoleKind::A, 4, Bargmann::q14}, p);
    CHECK(std::abs(e - (p.epsilon - p.omega) / 2.0) <
          10.0 * renormalized_frequency(p));
  }
  ModelParams bad{1.0, 2.0, 0.3, 0.5};
  CHECK_THROWS_AS(pole_energy({Model::two_photon, PoleKind::A, 0, Bargmann::q14}, bad),
                  std::domain_error);

  // strictly decreasing in g toward the collapse value
  double prev = std::numeric_limits<double>::infinity();
  for (double g = 0.05; g < 0.5; g += 0.05) {
    ModelParams p{1.0, 2.0, 0.3, g};
    const double e = pole_energy({Model::two_photon, PoleKind::A, 2, Bargmann::q34}, p);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("renormalized frequency and squeezing parameter") {
  CHECK(renormalized_frequency({1.0, 0.0, 0.0, 0.0}) == 1.0);
  CHECK(renormalized_frequency({1.0, 0.0, 0.0, 0.5}) == 0.0);
  CHECK(renormalized_frequency({1.0, 0.0, 0.0, 0.3}) == Catch::Approx(0.8).margin(1e-15));

  CHECK(squeeze_parameter({1.0, 0.0, 0.0, 0.0}) == 0.0);
  // high-precision value of (1/4) ln(0.25)
  CHECK(squeeze_parameter({1.0, 0.0, 0.0, 0.3}) ==
        Catch::Approx(-0.34657359027997264).epsilon(1e-14));
  CHECK(std::isfinite(squeeze_parameter({1.0, 0.0, 0.0, 0.49999})));
  CHECK_THROWS_AS(squeeze_parameter({1.0, 0.0, 0.0, 0.5}), std::domain_error);

  // identity used by the weight recurrences
  for (double g : {0.1, 0.25, 0.45}) {
    ModelParams p{2.0, 0.0, 0.0, g * 2.0};
    CHECK(std::tanh(2.0 * squeeze_parameter(p)) ==
          Catch::Approx(-2.0 * p.g / p.omega).epsilon(1e-14));
  }
}

TEST_CASE("scaling homogeneity of the core formulas") {
  std::mt19937_64 rng(20260810);
  std::uniform_real_distribution<double> uw(0.3, 3.0), ud(0.0, 3.0), ue(0.0, 2.0),
      ug(0.0, 1.2);
  for (int it = 0; it < 200; ++it) {
    const double w = uw(rng);
    ModelParams p{w, ud(rng) * w, ue(rng) * w, ug(rng) * w};
    ModelParams unit{1.0, p.delta / w, p.epsilon / w, p.g / w};
    for (int m : {0, 1, 5}) {
      for (PoleKind k : {PoleKind::A, PoleKind::B}) {
        const double a = pole_energy({Model::one_photon, k, m}, p);
        const double b = w * pole_energy({Model::one_photon, k, m}, unit);
        CHECK(a == Catch::Approx(b).epsilon(1e-12).margin(1e-12 * w));
      }
    }
    if (2.0 * p.g < p.omega) {
      CHECK(renormalized_frequency(p) ==
            Catch::Approx(w * renormalized_frequency(unit)).epsilon(1e-12));
      for (int m : {0, 3}) {
        const double a = pole_energy({Model::two_photon, PoleKind::B, m, Bargmann::q34}, p);
        const double b =
            w * pole_energy({Model::two_photon, PoleKind::B, m, Bargmann::q34}, unit);
        CHECK(a == Catch::Approx(b).epsilon(1e-12).margin(1e-12 * w));
      }
    }
  }
}

TEST_CASE("bracket_roots finds simple roots") {
  RootSearchConfig cfg = RootSearchConfig::over(0.0, 2.0);
  const auto scan = bracket_roots([](double x) { return x * x - 2.0; }, cfg);
  REQUIRE(scan.roots.size() == 1);
  CHECK(scan.roots[0] == Catch::Approx(std::sqrt(2.0)).margin(1e-9));
  CHECK(scan.unresolved.empty());
}

TEST_CASE("bracket_roots excludes poles from the scan") {
  // simple pole at x = 1 flips the sign without a root
  RootSearchConfig cfg = RootSearchConfig::over(0.0, 2.0);
  const auto f = [](double x) { return 1.0 / (x - 1.0); };
  const auto scan = bracket_roots(f, cfg, {1.0});
  CHECK(scan.roots.empty());
  CHECK(scan.unresolved.empty());
}

TEST_CASE("bracket_roots reports failing segments and keeps the rest") {
  RootSearchConfig cfg = RootSearchConfig::over(0.0, 2.0);
  const auto f = [](double x) {
    if (x > 1.2 && x < 1.3) throw std::runtime_error("no value here");
    return x - 0.5;
  };
  const auto scan = bracket_roots(f, cfg, {1.0});
  // the failure lies in the second pole-free segment; the first still scans
  REQUIRE(scan.unresolved.size() == 1);
  CHECK(scan.unresolved[0].first > 1.0);
  REQUIRE(scan.roots.size() == 1);
  CHECK(scan.roots[0] == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("bracket_roots on a polynomial with known roots") {
  // (x-0.2)(x-0.7)(x-1.4)(x-3.1), no duplicates, pairwise separated
  const auto f = [](double x) {
    return (x - 0.2) * (x - 0.7) * (x - 1.4) * (x - 3.1);
  };
  RootSearchConfig cfg = RootSearchConfig::over(0.0, 4.0);
  const auto scan = bracket_roots(f, cfg);
  REQUIRE(scan.roots.size() == 4);
  const double expect[] = {0.2, 0.7, 1.4, 3.1};
  for (int i = 0; i < 4; ++i)
    CHECK(scan.roots[i] == Catch::Approx(expect[i]).margin(1e-9));
  for (int i = 0; i + 1 < 4; ++i)
    CHECK(scan.roots[i + 1] - scan.roots[i] > 2.0 * cfg.abs_tol);
}

TEST_CASE("sturm chain counts and isolates roots") {
  // p(x) = (x-1)(x-2)(x-4) = x^3 - 7x^2 + 14x - 8
  Poly p{-8.0L, 14.0L, -7.0L, 1.0L};
  const auto chain = poly::sturm_chain(p);
  CHECK(poly::count_roots(chain, 0.0L, 5.0L) == 3);
  CHECK(poly::count_roots(chain, 1.5L, 3.0L) == 1);
  CHECK(poly::count_roots(chain, 4.5L, 9.0L) == 0);
  std::vector<std::pair<double, double>> iso;
  poly::isolate(chain, 0.0L, 5.0L, iso);
  REQUIRE(iso.size() == 3);
  const double roots[] = {1.0, 2.0, 4.0};
  for (int i = 0; i < 3; ++i) {
    const double r = poly::bisect_root(p, iso[i].first, iso[i].second, 1e-13);
    CHECK(r == Catch::Approx(roots[i]).margin(1e-12));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ModelParams({-1.0, 1.0, 0.0, 0.1}).validate(), std::domain_error);
  CHECK_THROWS_AS(ModelParams({1.0, -1.0, 0.0, 0.1}).validate(), std::domain_error);
  CHECK_THROWS_AS(ModelParams({1.0, 1.0, 0.0, -0.1}).validate(), std::domain_error);
  CHECK(with_nonnegative_bias({1.0, 1.0, -0.7, 0.1}).epsilon == 0.7);
  RootSearchConfig bad;
  bad.lo = 1.0;
  bad.hi = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}
