#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "rabi/oracle.hpp"

using namespace rabi;
namespace orc = rabi::oracle;

TEST_CASE("decoupled one-photon spectrum at g = 0") {
  ModelParams p{1.0, 1.7, 0.6, 0.0};
  const auto res = orc::eigenvalues(orc::build_1p(p, 60), 20);
  const double s = 0.5 * std::sqrt(p.delta * p.delta + p.epsilon * p.epsilon);
  std::vector<double> expect;
  for (int n = 0; n < 12; ++n) {
    expect.push_back(n * p.omega - s);
    expect.push_back(n * p.omega + s);
  }
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 20; ++i)
    CHECK(res.eigenvalues[i] == Catch::Approx(expect[i]).margin(1e-10));
}

TEST_CASE("displaced-oscillator limit: delta = 0, epsilon = 0") {
  ModelParams p{1.0, 0.0, 0.0, 0.45};
  const auto res = orc::eigenvalues(orc::build_1p(p, 120), 12);
  for (int n = 0; n < 6; ++n) {
    const double e = n * p.omega - p.g * p.g / p.omega;
    CHECK(res.eigenvalues[2 * n] == Catch::Approx(e).margin(1e-9));
    CHECK(res.eigenvalues[2 * n + 1] == Catch::Approx(e).margin(1e-9));
  }
}

TEST_CASE("one-photon degeneracy at the known crossing") {
  const double g = 0.599478940414;
  ModelParams p{1.0, 1.5, 1.0, g};
  const auto res = orc::eigenvalues(orc::build_1p(p, 200), 16);
  const double e = 1.5 - g * g;
  const auto pairs = orc::degenerate_pairs(res, 1e-7);
  bool found = false;
  for (const auto& [i, gap] : pairs)
    if (std::abs(res.eigenvalues[i] - e) < 1e-6) found = true;
  CHECK(found);
}

TEST_CASE("rotated and plain one-photon frames share the spectrum") {
  ModelParams p{1.0, 1.5, 0.8, 0.6};
  const auto a = orc::solve_all(orc::build_1p(p, 80).h);
  const auto b = orc::solve_all(orc::build_1p_rotated(p, 80).h);
  for (int i = 0; i < 40; ++i) CHECK(a[i] == Catch::Approx(b[i]).margin(1e-10));
}

TEST_CASE("decoupled two-photon sectors at g = 0") {
  ModelParams p{1.0, 2.0, 0.8, 0.0};
  const double s = 0.5 * std::sqrt(p.delta * p.delta + p.epsilon * p.epsilon);
  for (Bargmann q : {Bargmann::q14, Bargmann::q34}) {
    const auto res = orc::eigenvalues(orc::build_2p(p, 61, q), 10);
    std::vector<double> expect;
    for (int n = bargmann_parity(q); n < 14; n += 2) {
      expect.push_back(n * p.omega - s);
      expect.push_back(n * p.omega + s);
    }
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 10; ++i)
      CHECK(res.eigenvalues[i] == Catch::Approx(expect[i]).margin(1e-10));
  }
}

TEST_CASE("two-photon degeneracy at the known crossing") {
  const double g = 0.418330013267;  // beta^2 = 0.3
  const double beta = std::sqrt(0.3);
  ModelParams p{1.0, 2.0, 2.0 * beta, g};
  const auto res = orc::eigenvalues(orc::build_2p(p, 400, Bargmann::q14), 16);
  const double e = (1 + 2 + 0.5) * beta - 0.5;
  const auto pairs = orc::degenerate_pairs(res, 1e-6);
  bool found = false;
  for (const auto& [i, gap] : pairs)
    if (std::abs(res.eigenvalues[i] - e) < 1e-6) found = true;
  CHECK(found);
}

TEST_CASE("hamiltonians are symmetric as constructed") {
  ModelParams p{1.0, 1.5, 0.7, 0.3};
  for (const auto& h :
       {orc::build_1p(p, 40), orc::build_1p_rotated(p, 40),
        orc::build_2p(p, 41, Bargmann::q14), orc::build_2p(p, 41, Bargmann::q34),
        orc::build_2p_full(p, 41)}) {
    CHECK((h.h - h.h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sector spectra union equals the full two-photon spectrum") {
  ModelParams p{1.0, 2.0, 0.7, 0.31};
  const int n_max = 61;
  const auto even = orc::eigenvalues(orc::build_2p(p, n_max, Bargmann::q14), 20);
  const auto odd = orc::eigenvalues(orc::build_2p(p, n_max, Bargmann::q34), 20);
  const auto full = orc::eigenvalues(orc::build_2p_full(p, n_max), 40);
  std::vector<double> merged;
  merged.insert(merged.end(), even.eigenvalues.begin(), even.eigenvalues.end());
  merged.insert(merged.end(), odd.eigenvalues.begin(), odd.eigenvalues.end());
  std::sort(merged.begin(), merged.end());
  const double cap = std::min({even.converged_below, odd.converged_below,
                               full.converged_below, 6.0});
  for (int i = 0; i < 40 && merged[i] < cap && full.eigenvalues[i] < cap; ++i)
    CHECK(merged[i] == Catch::Approx(full.eigenvalues[i]).margin(1e-8));
}

TEST_CASE("custom matrices solve to their closed forms") {
  Eigen::MatrixXd m(2, 2);
  const double a = 0.7, b = -0.32, c = 1.9;
  m << a, b, b, c;
  const auto res = orc::eigenvalues(orc::TruncatedHamiltonian::from_matrix(m), 2);
  const double mid = 0.5 * (a + c), rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  CHECK(res.eigenvalues[0] == Catch::Approx(mid - rad).margin(1e-14));
  CHECK(res.eigenvalues[1] == Catch::Approx(mid + rad).margin(1e-14));

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
  d.diagonal() << 3.0, -1.0, 2.0, 0.5;
  const auto rd = orc::eigenvalues(orc::TruncatedHamiltonian::from_matrix(d), 4);
  const std::vector<double> expect{-1.0, 0.5, 2.0, 3.0};
  for (int i = 0; i < 4; ++i)
    CHECK(rd.eigenvalues[i] == Catch::Approx(expect[i]).margin(1e-14));

  CHECK_THROWS_AS(orc::eigenvalues(orc::TruncatedHamiltonian::from_matrix(d), 9),
                  std::domain_error);
}

TEST_CASE("verify_zeros matching and detector sanity") {
  orc::OracleResult res;
  res.eigenvalues = {0.1, 0.5, 1.2};
  res.converged_below = 10.0;

  const auto ok = orc::verify_zeros({0.1, 0.5, 1.2}, res, 1e-6);
  CHECK(ok.success);
  CHECK(ok.matched.size() == 3);

  // empty zero list vs empty window
  orc::OracleResult empty;
  empty.converged_below = 10.0;
  CHECK(orc::verify_zeros({}, empty, 1e-6).success);

  // a perturbed zero is reported on both unmatched lists
  const auto bad = orc::verify_zeros({0.1, 0.5 + 1e-3, 1.2}, res, 1e-6);
  CHECK_FALSE(bad.success);
  REQUIRE(bad.unmatched_zeros.size() == 1);
  CHECK(bad.unmatched_zeros[0] == Catch::Approx(0.5 + 1e-3));
  REQUIRE(bad.unmatched_levels.size() == 1);
  CHECK(bad.unmatched_levels[0] == Catch::Approx(0.5));
}

TEST_CASE("displaced Fock states are orthonormal and coherent at n = 0") {
  const double alpha = -0.45;
  const int cutoff = 120;
  const auto d0 = orc::displaced_fock(alpha, 0, cutoff);
  for (int k = 0; k < 8; ++k) {
    const double expect = std::exp(-0.5 * alpha * alpha) * std::pow(alpha, k) /
                          std::sqrt(std::tgamma(k + 1.0));
    CHECK(d0[k] == Catch::Approx(expect).margin(1e-12));
  }
  const auto d3 = orc::displaced_fock(alpha, 3, cutoff);
  const auto d4 = orc::displaced_fock(alpha, 4, cutoff);
  CHECK(d3.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(d3.dot(d4)) < 1e-12);
}

TEST_CASE("squeezed Fock states are orthonormal and parity preserving") {
  const double zeta = -0.6;
  const int cutoff = 300;
  const auto s0 = orc::squeezed_fock(zeta, 0, cutoff);
  const auto s2 = orc::squeezed_fock(zeta, 2, cutoff);
  const auto s3 = orc::squeezed_fock(zeta, 3, cutoff);
  CHECK(s0.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK(s2.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK(s3.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(s0.dot(s2)) < 1e-12);
  // squeezed vacuum amplitudes: even support, known two-term recursion
  CHECK(s0[0] == Catch::Approx(1.0 / std::sqrt(std::cosh(zeta))).margin(1e-14));
  CHECK(s0[1] == 0.0);
  CHECK(s0[2] ==
        Catch::Approx(-std::tanh(zeta) / std::sqrt(2.0) * s0[0]).margin(1e-14));
  for (int k = 1; k < cutoff; k += 2) {
    CHECK(s0[k] == 0.0);
    CHECK(s2[k] == 0.0);
  }
  for (int k = 0; k < cutoff; k += 2) CHECK(s3[k] == 0.0);
}

TEST_CASE("cutoff-stability bound tightens with the cutoff") {
  ModelParams p{1.0, 3.0, 0.4, 0.35};
  const auto small = orc::eigenvalues(orc::build_2p(p, 31, Bargmann::q14), 10);
  const auto large = orc::eigenvalues(orc::build_2p(p, 201, Bargmann::q14), 10);
  CHECK(small.converged_below <= large.converged_below);
  CHECK(large.converged_below > 6.0);  // window used by the acceptance suite
}
