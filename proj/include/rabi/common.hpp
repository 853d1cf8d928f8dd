#pragma once

// Shared parameter types, pole-line machinery, and the squeezed-frame
// quantities used by both model families.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rabi {

enum class Model { one_photon, two_photon };

enum class PoleKind { A, B };

// Bargmann index labeling the even (q = 1/4) and odd (q = 3/4) Fock
// sectors of the two-photon model. Kept as an enumeration so the two
// allowed values are exact.
enum class Bargmann { q14, q34 };

inline constexpr double bargmann_value(Bargmann q) {
  return q == Bargmann::q14 ? 0.25 : 0.75;
}

// Fock parity of the sector: 0 = even, 1 = odd.
inline constexpr int bargmann_parity(Bargmann q) {
  return q == Bargmann::q14 ? 0 : 1;
}

inline std::string to_string(Model m) {
  return m == Model::one_photon ? "1p" : "2p";
}
inline std::string to_string(PoleKind k) { return k == PoleKind::A ? "A" : "B"; }
inline std::string to_string(Bargmann q) {
  return q == Bargmann::q14 ? "1/4" : "3/4";
}

// Physical parameters of either model. All quantities carry the caller's
// energy units; nothing below assumes omega = 1.
struct ModelParams {
  double omega = 1.0;    // cavity frequency, > 0
  double delta = 0.0;    // qubit splitting, >= 0
  double epsilon = 0.0;  // qubit bias; the suite canonicalizes to >= 0
  double g = 0.0;        // qubit-cavity coupling, >= 0

  void validate() const {
    if (!(omega > 0.0)) throw std::domain_error("ModelParams: omega must be > 0");
    if (!(delta >= 0.0)) throw std::domain_error("ModelParams: delta must be >= 0");
    if (!(g >= 0.0)) throw std::domain_error("ModelParams: g must be >= 0");
  }
};

// The spectrum is even in the bias once the two frame roles are swapped;
// callers holding epsilon < 0 can canonicalize with this.
inline ModelParams with_nonnegative_bias(ModelParams p) {
  p.epsilon = std::abs(p.epsilon);
  return p;
}

// Renormalized cavity frequency beta = omega * sqrt(1 - 4 (g/omega)^2) of
// the squeezed two-photon frame. Defined up to the collapse boundary
// g = omega/2 where it vanishes.
inline double renormalized_frequency(const ModelParams& p) {
  p.validate();
  const double x = 2.0 * p.g / p.omega;
  if (x > 1.0) throw std::domain_error("renormalized_frequency: g > omega/2");
  return p.omega * std::sqrt((1.0 - x) * (1.0 + x));
}

// Squeezing parameter r = (1/4) ln((1 - 2g/omega)/(1 + 2g/omega)); real
// (and <= 0) only for g < omega/2. Satisfies tanh(2r) = -2g/omega.
inline double squeeze_parameter(const ModelParams& p) {
  p.validate();
  const double x = 2.0 * p.g / p.omega;
  if (x >= 1.0) throw std::domain_error("squeeze_parameter: g >= omega/2");
  return 0.25 * std::log((1.0 - x) / (1.0 + x));
}

// One baseline energy of a G-function denominator family. Type A carries
// +epsilon/2, type B carries -epsilon/2.
struct PoleLine {
  Model model = Model::one_photon;
  PoleKind kind = PoleKind::A;
  int index = 0;                  // m >= 0
  std::optional<Bargmann> q{};    // two-photon only

  std::string label() const {
    std::string s = to_string(model) + ":" + to_string(kind) +
                    std::to_string(index);
    if (q) s += ",q=" + to_string(*q);
    return s;
  }
};

inline double pole_energy(const PoleLine& line, const ModelParams& p) {
  p.validate();
  if (line.index < 0) throw std::domain_error("pole_energy: index must be >= 0");
  const double sign = line.kind == PoleKind::A ? 1.0 : -1.0;
  if (line.model == Model::one_photon) {
    return line.index * p.omega - p.g * p.g / p.omega + sign * p.epsilon / 2.0;
  }
  if (!line.q) throw std::domain_error("pole_energy: two-photon line needs a Bargmann index");
  if (2.0 * p.g >= p.omega)
    throw std::domain_error("pole_energy: two-photon line requires g < omega/2");
  const double beta = renormalized_frequency(p);
  const double q = bargmann_value(*line.q);
  return line.kind == PoleKind::A
             ? 2.0 * beta * (line.index + q) + (p.epsilon - p.omega) / 2.0
             : 2.0 * beta * (line.index + q) - (p.epsilon + p.omega) / 2.0;
}

// A quasi-exact eigenstate whose series terminates at finite order. The
// amplitudes are over the frame basis states: D(alpha)|n> for the
// one-photon model, S(zeta)|n_Fock(m)> for the two-photon model (with
// n_Fock(m) = 2m + parity of the sector). `upper`/`lower` are the two
// spinor components in the coupling-diagonal frame.
struct TerminatedState {
  Model model = Model::one_photon;
  PoleKind frame = PoleKind::A;
  std::optional<Bargmann> q{};
  double frame_parameter = 0.0;  // displacement alpha (1p) or squeeze zeta (2p)
  double energy = 0.0;
  std::vector<double> upper;
  std::vector<double> lower;
};

// Thrown when an energy handed to a G-function sits inside the exclusion
// margin of a pole line.
class PoleProximityError : public std::runtime_error {
 public:
  PoleProximityError(PoleLine line, double pole_e, double e)
      : std::runtime_error("energy " + std::to_string(e) +
                           " within pole margin of " + line.label() +
                           " at E = " + std::to_string(pole_e)),
        line(line), pole_e(pole_e), e(e) {}
  PoleLine line;
  double pole_e;
  double e;
};

// Thrown when a series or iterative stage fails to converge.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, long terms, double tail)
      : std::runtime_error(what + " (terms=" + std::to_string(terms) +
                           ", tail=" + std::to_string(tail) + ")"),
        terms(terms), tail(tail) {}
  long terms;
  double tail;
};

// Thrown when the f-side and c-side constraint roots of a degenerate-point
// search disagree.
class InconsistencyError : public std::runtime_error {
 public:
  InconsistencyError(const std::string& what, double residual_f, double residual_c)
      : std::runtime_error(what), residual_f(residual_f), residual_c(residual_c) {}
  double residual_f;
  double residual_c;
};

}  // namespace rabi
