#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rabi/one_photon.hpp"
#include "rabi/oracle.hpp"
#include "rabi/scan.hpp"
#include "reference_models.hpp"

using namespace rabi;
namespace op = rabi::one_photon;

namespace {
const ModelParams kFig1{1.0, 1.5, 1.0, 0.3};
}

TEST_CASE("coefficient recurrence initial conditions and first step") {
  const double E = 0.37;
  const auto t = op::coeffs_fe(kFig1, E);
  REQUIRE(t.primary.size() >= 2);
  CHECK(t.primary[0] == 1.0);
  CHECK(t.converged);

  // direct n = 0 instance of the recurrence, f_{-1} = 0
  const double g = kFig1.g, d = kFig1.delta, eps = kFig1.epsilon;
  const double f1 = (1.0 / (2.0 * g)) *
                    (3.0 * g * g - eps / 2.0 - E -
                     d * d / (4.0 * (-g * g + eps / 2.0 - E)));
  CHECK(t.primary[1] == Catch::Approx(f1).epsilon(1e-14));

  // partner linear relation
  for (int n = 0; n < 5; ++n) {
    const double den = n * 1.0 - g * g + eps / 2.0 - E;
    CHECK(t.partner[n] == Catch::Approx(0.5 * d * t.primary[n] / den).epsilon(1e-13));
  }
}

TEST_CASE("coefficients vanish at the degenerate point") {
  // E pinned on the overlapped line: table truncates at the resonant index
  const double g = 0.5995;
  ModelParams p{1.0, 1.5, 1.0, g};
  const double E = 1.5 - g * g;
  const auto fe = op::coeffs_fe(p, E);
  REQUIRE(fe.primary.size() == 2);
  CHECK_FALSE(fe.converged);
  CHECK(std::abs(fe.primary[1]) < 1e-3);

  const auto cd = op::coeffs_cd(p, E);
  REQUIRE(cd.primary.size() == 3);
  CHECK(std::abs(cd.primary[2]) < 1e-3);
}

TEST_CASE("zero bias collapses the two branches") {
  ModelParams p{1.0, 1.5, 0.0, 0.42};
  const double E = 0.83;
  const auto fe = op::coeffs_fe(p, E);
  const auto cd = op::coeffs_cd(p, E);
  REQUIRE(fe.primary.size() == cd.primary.size());
  for (std::size_t n = 0; n < fe.primary.size(); ++n)
    CHECK(fe.primary[n] == Catch::Approx(cd.primary[n]).margin(1e-14));
}

TEST_CASE("G-function matches the truncated-Fock oracle") {
  const auto zeros = rabi::scan::regular_zeros(Model::one_photon, std::nullopt,
                                               kFig1, -1.7, 5.0);
  REQUIRE(zeros.unresolved.empty());
  const auto res = oracle::eigenvalues(oracle::build_1p(kFig1, 150), 24);
  const auto rep = oracle::verify_zeros(zeros.roots, res, 1e-6, 5.0);
  CHECK(rep.success);
  CHECK(rep.worst_abs_diff < 1e-6);
  CHECK(rep.matched.size() >= 10);
}

TEST_CASE("G-function is even in the bias") {
  for (double E : {-0.8, 0.77, 2.3}) {
    ModelParams plus{1.0, 1.5, 0.7, 0.35};
    ModelParams minus = plus;
    minus.epsilon = -plus.epsilon;
    CHECK(op::g_function(plus, E) ==
          Catch::Approx(op::g_function(minus, E)).epsilon(1e-12));
  }
}

TEST_CASE("G-function sign flips across a simple pole") {
  ModelParams p{1.0, 1.5, 0.4, 0.25};
  const double pole = pole_energy({Model::one_photon, PoleKind::A, 2}, p);
  const double h = 1e-4;
  const double left = op::g_function(p, pole - h);
  const double right = op::g_function(p, pole + h);
  CHECK(std::abs(left) > 1.0);  // residue dominates this close
  CHECK((left < 0.0) != (right < 0.0));
}

TEST_CASE("G-function refuses energies inside the pole margin") {
  ModelParams p{1.0, 1.5, 0.4, 0.25};
  const double pole = pole_energy({Model::one_photon, PoleKind::B, 1}, p);
  CHECK_THROWS_AS(op::g_function(p, pole + 1e-8), PoleProximityError);
  try {
    op::g_function(p, pole + 1e-8);
  } catch (const PoleProximityError& e) {
    CHECK(e.line.kind == PoleKind::B);
    CHECK(e.line.index == 1);
  }
}

TEST_CASE("overlapped-line constraints: closed forms") {
  // N = 1: root at g = (1/2) sqrt(M - (delta/2)^2)
  const double root12 = 0.5 * std::sqrt(2.0 - 0.75 * 0.75);
  const auto f = [](double g) { return op::pole_constraint_f(1, 2, 1.5, 1.0, g); };
  CHECK(f(root12) == Catch::Approx(0.0).margin(1e-12));
  CHECK(f(root12 - 0.05) * f(root12 + 0.05) < 0.0);

  // delta = 3 > 2 sqrt(2): no real positive root
  const auto scan = bracket_roots(
      [](double g) { return op::pole_constraint_f(1, 2, 3.0, 1.0, g); },
      RootSearchConfig::over(0.0, 3.0), {0.0});
  CHECK(scan.roots.empty());

  // (2, 3) radical at delta = 1.5
  const auto pts = op::find_degenerate(2, 3, 1.5, 1.0);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].g == Catch::Approx(0.4804).margin(1e-4));
  CHECK(pts[1].g == Catch::Approx(1.0287).margin(1e-4));
  const auto closed = op::closed_form_roots(2, 3, 1.5, 1.0);
  REQUIRE(closed.size() == 2);
  CHECK(std::abs(pts[0].g - closed[0]) < 1e-10);
  CHECK(std::abs(pts[1].g - closed[1]) < 1e-10);
}

TEST_CASE("degenerate points carry the overlapped-line data") {
  const auto pts = op::find_degenerate(1, 2, 1.5, 1.0);
  REQUIRE(pts.size() == 1);
  const auto& pt = pts[0];
  CHECK(pt.g == Catch::Approx(0.5995).margin(1e-4));
  CHECK(pt.epsilon == 1.0);
  CHECK(pt.energy == Catch::Approx(1.5 - pt.g * pt.g).margin(1e-14));
  CHECK(std::max(pt.residual_f, pt.residual_c) < 1e-10);

  // both defining constraints vanish and the pole energies coincide
  ModelParams p{1.0, 1.5, pt.epsilon, pt.g};
  CHECK(pole_energy({Model::one_photon, PoleKind::A, 1}, p) ==
        Catch::Approx(pole_energy({Model::one_photon, PoleKind::B, 2}, p))
            .margin(1e-14));
}

TEST_CASE("degenerate search rejects invalid indices") {
  CHECK_THROWS_AS(op::find_degenerate(0, 2, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(op::find_degenerate(2, 2, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(op::pole_constraint_f(0, 2, 1.5, 1.0, 0.3), std::domain_error);
}

TEST_CASE("shared-root property on a small grid") {
  for (double delta : {1.0, 2.0, 3.0}) {
    for (auto [N, M] : {std::pair{1, 2}, std::pair{2, 5}, std::pair{3, 7}}) {
      RootSearchConfig cfg =
          RootSearchConfig::over(0.0, std::max(2.0, std::sqrt((double)M)), 1.0);
      cfg.abs_tol = 1e-12;
      const auto fr = bracket_roots(
          [&](double g) { return op::pole_constraint_f(N, M, delta, 1.0, g); }, cfg,
          {0.0});
      const auto cr = bracket_roots(
          [&](double g) { return op::pole_constraint_c(N, M, delta, 1.0, g); }, cfg,
          {0.0});
      REQUIRE(fr.roots.size() == cr.roots.size());
      for (std::size_t i = 0; i < fr.roots.size(); ++i)
        CHECK(std::abs(fr.roots[i] - cr.roots[i]) < 1e-8);
    }
  }
}

TEST_CASE("terminated states: termination is forced by the partner choice") {
  const auto pts = op::find_degenerate(2, 3, 1.5, 1.0);
  for (const auto& pt : pts) {
    // rebuild f_0..f_N by the constraint recurrence, then continue one raw
    // step past N with e_N = -(4g/delta) f_{N-1}
    std::vector<double> fs{1.0};
    double prev = 0.0, cur = 1.0;
    double fmax = 1.0;
    for (int n = 0; n < pt.N; ++n) {
      const double a = 4.0 * pt.g * pt.g + (n - pt.M) -
                       1.5 * 1.5 / (4.0 * (n - pt.N));
      const double next = (a * cur / (2.0 * pt.g) - prev) / (n + 1);
      prev = cur;
      cur = next;
      fs.push_back(cur);
      fmax = std::max(fmax, std::abs(cur));
    }
    const double f_N = fs[pt.N];
    const double drift_N = (pt.N - pt.M) + 4.0 * pt.g * pt.g;
    const double f_Np1 = drift_N * f_N / (2.0 * pt.g * (pt.N + 1));
    CHECK(std::abs(f_Np1) < 1e-12 * fmax);
  }
}

TEST_CASE("terminated states: oracle residual and independence") {
  ModelParams base{1.0, 1.5, 1.0, 0.0};
  for (const auto& pt : op::find_degenerate(1, 2, 1.5, 1.0)) {
    const auto [a, b] = op::degenerate_states(pt, base);
    const auto h = oracle::build_1p_rotated(ModelParams{1.0, 1.5, pt.epsilon, pt.g}, 150);
    const auto psi_a = oracle::embed_terminated(a, h);
    const auto psi_b = oracle::embed_terminated(b, h);
    CHECK(oracle::state_residual(h, psi_a, pt.energy) < 1e-8);
    CHECK(oracle::state_residual(h, psi_b, pt.energy) < 1e-8);
    CHECK(oracle::normalized_overlap(psi_a, psi_b) < 1.0 - 1e-8);
  }
}

TEST_CASE("exceptional kinds validate their inputs") {
  ModelParams integer_eps{1.0, 1.5, 1.0, 0.3};
  CHECK_THROWS_AS(op::exceptional_g(op::ExcKind::x1A, 1, integer_eps), std::domain_error);
  ModelParams fractional{1.0, 1.5, 0.7, 0.3};
  CHECK_THROWS_AS(op::exceptional_g(op::ExcKind::merged, 1, fractional), std::domain_error);
  CHECK_THROWS_AS(op::exceptional_g(op::ExcKind::x1A, 0, fractional), std::domain_error);
  // B-pinned kinds stay valid at integer bias when the resonance index is
  // out of range (k > M)
  CHECK_NOTHROW(op::exceptional_g(op::ExcKind::x2B, 0, integer_eps));
}

TEST_CASE("kind-1A zeros sit on the truncated G-expression and the spectrum") {
  ModelParams base{1.0, 1.5, 0.7, 0.1};
  const auto zeros = op::exceptional_zeros(op::ExcKind::x1A, 1, base, 0.0, 2.0);
  REQUIRE_FALSE(zeros.empty());
  for (double z : zeros) {
    ModelParams p = base;
    p.g = z;
    // the G-expression vanishes there as well (factorization through f_N)
    ModelParams pl = base, pr = base;
    pl.g = z - 0.01;
    pr.g = z + 0.01;
    const double scale = std::max({std::abs(op::exceptional_g(op::ExcKind::x1A, 1, pl)),
                                   std::abs(op::exceptional_g(op::ExcKind::x1A, 1, pr)),
                                   1.0});
    CHECK(std::abs(op::exceptional_g(op::ExcKind::x1A, 1, p)) < 1e-6 * scale);
    // and an eigenvalue sits on the pinned pole line
    const double ep = pole_energy({Model::one_photon, PoleKind::A, 1}, p);
    const auto res = oracle::eigenvalues(oracle::build_1p(p, 150), 16);
    double best = 1e9;
    for (double v : res.eigenvalues) best = std::min(best, std::abs(v - ep));
    CHECK(best < 1e-6);
  }
}

TEST_CASE("merged-kind zeros are genuine exceptional points") {
  ModelParams base{1.0, 1.5, 1.0, 0.1};
  const auto zeros = op::exceptional_zeros(op::ExcKind::merged, 0, base, 0.0, 1.15);
  REQUIRE(zeros.size() == 1);
  ModelParams p = base;
  p.g = zeros[0];
  const double ep = pole_energy({Model::one_photon, PoleKind::A, 0}, p);
  const auto res = oracle::eigenvalues(oracle::build_1p(p, 150), 16);
  double best = 1e9;
  for (double v : res.eigenvalues) best = std::min(best, std::abs(v - ep));
  CHECK(best < 1e-6);
}

TEST_CASE("the delta = 3 spectrum has one kind-2B point on the lowest B line") {
  ModelParams base{1.0, 3.0, 1.0, 0.1};
  const auto zeros = op::exceptional_zeros(op::ExcKind::x2B, 0, base, 0.0, 1.2);
  REQUIRE(zeros.size() == 1);
  ModelParams p = base;
  p.g = zeros[0];
  const double ep = pole_energy({Model::one_photon, PoleKind::B, 0}, p);
  const auto res = oracle::eigenvalues(oracle::build_1p(p, 150), 16);
  double best = 1e9;
  for (double v : res.eigenvalues) best = std::min(best, std::abs(v - ep));
  CHECK(best < 1e-6);
}

TEST_CASE("zero-bias reduction against the symmetric reference") {
  ModelParams p{1.0, 1.5, 0.0, 0.42};
  for (double E : {-0.9, -0.3, 0.21, 0.83, 1.37}) {
    const double mine = op::g_function(p, E);
    const double gp = ref::sym_qrm_g(1.0, 1.5, 0.42, E, +1);
    const double gm = ref::sym_qrm_g(1.0, 1.5, 0.42, E, -1);
    CHECK(mine == Catch::Approx(-gp * gm).margin(1e-12));
  }
}
