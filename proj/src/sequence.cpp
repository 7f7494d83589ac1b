#include "tcs/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tcs/errors.hpp"

namespace tcs {

namespace {

using Matrix = Unitary4::Matrix;

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Phases such as Delta T reach ~1e5 rad; they are formed and wrapped in
// extended precision so that the operator product and the closed forms see
// the same angle to ~1e-15.
double wrapped(long double angle) {
  constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;
  return static_cast<double>(angle - kTwoPi * std::nearbyint(angle / kTwoPi));
}

Complex phase_factor(long double angle) { return std::polar(1.0, wrapped(angle)); }

Matrix real_matrix(const std::array<std::array<double, 4>, 4>& m, double scale) {
  Matrix out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[i][j] = m[i][j] * scale;
  }
  return out;
}

Matrix diagonal(const std::array<Complex, 4>& d) {
  Matrix out{};
  for (std::size_t i = 0; i < 4; ++i) out[i][i] = d[i];
  return out;
}

std::array<Complex, 4> phase_diagonal(const SequenceParams& p) {
  const long double T = p.T;
  const long double big_delta = p.detuning;
  const long double small_delta = p.lower_detuning;
  const long double eps = p.epsilon;
  return {Complex(1.0, 0.0), phase_factor(-small_delta * T), phase_factor((big_delta + eps) * T),
          phase_factor((big_delta - small_delta) * T)};
}

// Fixed pulses, shared by final_state without re-checking unitarity.
const Unitary4& bs() {
  static const Unitary4 u = u_bs();
  return u;
}
const Unitary4& pi_half() {
  static const Unitary4 u = u_pi_half();
  return u;
}
const Unitary4& pi_lower() {
  static const Unitary4 u = u_pi_lower();
  return u;
}
const Unitary4& bs_dagger() {
  static const Unitary4 u = u_bs().adjoint();
  return u;
}
const Unitary4& pi_half_dagger() {
  static const Unitary4 u = u_pi_half().adjoint();
  return u;
}

}  // namespace

StateVector4 StateVector4::basis(Basis k) {
  StateVector4 s;
  s.a_[k] = 1.0;
  return s;
}

double StateVector4::norm_squared() const {
  double n = 0.0;
  for (const auto& a : a_) n += std::norm(a);
  return n;
}

double Unitary4::residual(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < 4; ++k) s += std::conj(m[k][i]) * m[k][j];
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

Unitary4::Unitary4(const Matrix& entries) : m_(entries) {
  const double r = residual(m_);
  if (!(r < kTolerance)) {
    throw InvalidInput("Unitary4: matrix is not unitary (residual " + std::to_string(r) + ")");
  }
}

Unitary4 Unitary4::identity() {
  Matrix m{};
  for (std::size_t i = 0; i < 4; ++i) m[i][i] = 1.0;
  return Unitary4(m, Unchecked{});
}

Unitary4 Unitary4::adjoint() const {
  Matrix out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[i][j] = std::conj(m_[j][i]);
  }
  return Unitary4(out, Unchecked{});
}

Unitary4 operator*(const Unitary4& lhs, const Unitary4& rhs) {
  Matrix out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < 4; ++k) s += lhs.m_[i][k] * rhs.m_[k][j];
      out[i][j] = s;
    }
  }
  return Unitary4(out, Unitary4::Unchecked{});
}

StateVector4 operator*(const Unitary4& u, const StateVector4& s) {
  StateVector4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    Complex acc{};
    for (std::size_t k = 0; k < 4; ++k) acc += u.m_[i][k] * s[k];
    out[i] = acc;
  }
  return out;
}

void SequenceParams::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidInput("sequence: T must be positive");
  }
  if (!std::isfinite(detuning) || !std::isfinite(lower_detuning) || !std::isfinite(epsilon) ||
      !std::isfinite(drive_frequency)) {
    throw InvalidInput("sequence: detunings, epsilon and drive frequency must be finite");
  }
}

double sign_of(SignConvention c) { return c == SignConvention::printed ? 1.0 : -1.0; }

Unitary4 u_bs() {
  return Unitary4(real_matrix({{{1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, -1}}}, kInvSqrt2));
}

Unitary4 u_pi_half() {
  return Unitary4(
      real_matrix({{{1, 0, -1, 0}, {0, 1, 0, -1}, {1, 0, 1, 0}, {0, 1, 0, 1}}}, kInvSqrt2));
}

// Signed permutation |g;2> -> |e;2>, |e;2> -> -|g;2>; the upper arm is untouched.
Unitary4 u_pi_lower() {
  return Unitary4(real_matrix({{{1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}, {0, 1, 0, 0}}}, 1.0));
}

Unitary4 u_phase(const SequenceParams& p) {
  p.validate();
  return Unitary4(diagonal(phase_diagonal(p))); }

Unitary4 u_rot(const SequenceParams& p) {
  const Complex w = phase_factor(static_cast<long double>(p.drive_frequency) * p.T);
  return Unitary4(diagonal({Complex(1.0, 0.0), Complex(1.0, 0.0), w, w}));
}

Unitary4 sequence_unitary(const SequenceParams& p) {
  return u_rot(p).adjoint() * pi_half_dagger() * bs_dagger() * pi_lower() * u_phase(p) * bs() *
         pi_half();
}

StateVector4 final_state(const SequenceParams& p) {
  p.validate();
  StateVector4 s = bs() * (pi_half() * StateVector4::basis(kG1));
  const auto phases = phase_diagonal(p);
  for (std::size_t i = 0; i < 4; ++i) s[i] *= phases[i];
  s = pi_half_dagger() * (bs_dagger() * (pi_lower() * s));
  const Complex frame = std::conj(phase_factor(static_cast<long double>(p.drive_frequency) * p.T));
  s[kE1] *= frame;
  s[kE2] *= frame;
  return s;
}

std::array<double, 4> joint_probabilities(const StateVector4& s) {
  return {std::norm(s[kG1]), std::norm(s[kG2]), std::norm(s[kE1]), std::norm(s[kE2])};
}

double p_upper_port(const StateVector4& s) { return std::norm(s[kG1]) + std::norm(s[kE1]); }
double p_lower_port(const StateVector4& s) { return std::norm(s[kG2]) + std::norm(s[kE2]); }
double p_ground(const StateVector4& s) { return std::norm(s[kG1]) + std::norm(s[kG2]); }
double p_excited(const StateVector4& s) { return std::norm(s[kE1]) + std::norm(s[kE2]); }

double closed_form_p1(const SequenceParams& p, SignConvention c) {
  p.validate();
  const long double s = sign_of(c);
  const long double T = p.T;
  const long double half_eps = s * static_cast<long double>(p.epsilon) / 2.0L;
  const double port = std::sin(wrapped(T * (static_cast<long double>(p.lower_detuning) - half_eps)));
  const double fringe = std::sin(wrapped(T * (static_cast<long double>(p.detuning) - half_eps)));
  return 0.5 * (1.0 - port * fringe);
}

double closed_form_pg(const SequenceParams& p, SignConvention c) {
  p.validate();
  const long double s = sign_of(c);
  const long double T = p.T;
  const long double half_eps = s * static_cast<long double>(p.epsilon) / 2.0L;
  const double fringe = std::sin(wrapped(T * (static_cast<long double>(p.detuning) - half_eps)));
  const double contrast = std::sin(wrapped(T * half_eps));
  return 0.5 * (1.0 + fringe * contrast);
}

double port_amplitude(const SequenceParams& p, SignConvention c) {
  p.validate();
  const long double half_eps = sign_of(c) * static_cast<long double>(p.epsilon) / 2.0L;
  return 0.5 * std::abs(std::sin(wrapped(static_cast<long double>(p.T) *
                                         (static_cast<long double>(p.detuning) - half_eps))));
}

double visibility(double T, double epsilon) {
  if (!(T > 0.0)) {
    throw InvalidInput("visibility: T must be positive");
  }
  return std::sin(T * epsilon / 2.0);
}

double visibility_no_pi_pulse(double T, double epsilon) {
  const double x = T * epsilon;
  return 1.0 - x * x / 8.0;
}

}  // namespace tcs
