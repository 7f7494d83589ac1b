#pragma once

#include <array>
#include <complex>
#include <cstddef>

// Four-level model of the clock interferometer.
//
// Basis order is fixed: index 0 = |g;1>, 1 = |g;2>, 2 = |e;1>, 3 = |e;2>, where
// g/e is the clock state and 1/2 the upper/lower arm. Pulses are instantaneous
// ideal unitaries.
namespace tcs {

using Complex = std::complex<double>;

enum Basis : std::size_t { kG1 = 0, kG2 = 1, kE1 = 2, kE2 = 3 };

class StateVector4 {
 public:
  StateVector4() = default;
  explicit StateVector4(const std::array<Complex, 4>& amplitudes) : a_(amplitudes) {}

  static StateVector4 basis(Basis k);

  const Complex& operator[](std::size_t i) const { return a_[i]; }
  Complex& operator[](std::size_t i) { return a_[i]; }
  const std::array<Complex, 4>& amplitudes() const { return a_; }

  double norm_squared() const;

 private:
  std::array<Complex, 4> a_{};
};

class Unitary4 {
 public:
  using Matrix = std::array<std::array<Complex, 4>, 4>;

  static constexpr double kTolerance = 1e-12;

  // Throws InvalidInput when max |U^dagger U - I| exceeds kTolerance.
  explicit Unitary4(const Matrix& entries);

  static Unitary4 identity();

  const Complex& operator()(std::size_t row, std::size_t col) const { return m_[row][col]; }
  const Matrix& entries() const { return m_; }

  Unitary4 adjoint() const;
  double unitarity_residual() const { return residual(m_); }

  friend Unitary4 operator*(const Unitary4& lhs, const Unitary4& rhs);
  friend StateVector4 operator*(const Unitary4& u, const StateVector4& s);

  static double residual(const Matrix& m);

 private:
  struct Unchecked {};
  Unitary4(const Matrix& entries, Unchecked) : m_(entries) {}

  Matrix m_{};
};

struct SequenceParams {
  double T = 1.0;                // phase-accumulation duration, s
  double detuning = 0.0;         // Delta = omega - omega0, rad/s
  double lower_detuning = 0.0;   // delta = (E_g2 - E_g1) / hbar, rad/s
  double epsilon = 0.0;          // redshift, rad/s
  double drive_frequency = 0.0;  // omega, rad/s; only enters the rotating frame

  void validate() const;
};

// Sign of the epsilon/2 shift in the closed-form probabilities.
//
// The operator product yields sin(T(Delta + eps/2)) and sin(T(delta + eps/2)),
// and a negative sign on the sin(T eps/2) factor of P_g; the printed forms are
// the same expressions with eps -> -eps. Fringe amplitudes and |frequencies|
// agree between the two.
enum class SignConvention {
  matrix_product,  // s = -1, agrees with final_state
  printed,         // s = +1
};

inline constexpr SignConvention kDefaultConvention = SignConvention::matrix_product;

double sign_of(SignConvention c);

Unitary4 u_bs();
Unitary4 u_pi_half();
Unitary4 u_pi_lower();
Unitary4 u_phase(const SequenceParams& p);
Unitary4 u_rot(const SequenceParams& p);

// U_rot^dag U_pi/2^dag U_BS^dag U_pi,l U_phase U_BS U_pi/2.
Unitary4 sequence_unitary(const SequenceParams& p);

// The sequence applied to |g;1>.
StateVector4 final_state(const SequenceParams& p);

// |a_k|^2 in basis order (g1, g2, e1, e2).
std::array<double, 4> joint_probabilities(const StateVector4& s);

double p_upper_port(const StateVector4& s);
double p_lower_port(const StateVector4& s);
double p_ground(const StateVector4& s);
double p_excited(const StateVector4& s);

double closed_form_p1(const SequenceParams& p, SignConvention c = kDefaultConvention);
double closed_form_pg(const SequenceParams& p, SignConvention c = kDefaultConvention);

// Half-width of the exit-port oscillation, 1/2 |sin(T(Delta - s eps/2))|.
double port_amplitude(const SequenceParams& p, SignConvention c = kDefaultConvention);

// sin(T eps / 2).
double visibility(double T, double epsilon);

// Small-eps law for the same sequence without the lower-arm pi pulse.
double visibility_no_pi_pulse(double T, double epsilon);

}  // namespace tcs
