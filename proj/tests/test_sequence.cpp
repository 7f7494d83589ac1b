#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tcs/errors.hpp"
#include "tcs/sequence.hpp"

using namespace tcs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SequenceParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> T(0.01, 20.0), D(-kTwoPi * 2000.0, kTwoPi * 2000.0),
      d(-kTwoPi * 1e4, kTwoPi * 1e4), e(-0.5, 0.5), w(0.0, 1e6);
  SequenceParams p;
  p.T = T(rng);
  p.detuning = D(rng);
  p.lower_detuning = d(rng);
  p.epsilon = e(rng);
  p.drive_frequency = w(rng);
  return p;
}

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("fixed pulses are unitary") {
  for (const Unitary4& u : {u_bs(), u_pi_half(), u_pi_lower(), Unitary4::identity()}) {
    CHECK(u.unitarity_residual() < 1e-15);
    CHECK((u * u.adjoint()).unitarity_residual() < 1e-15);
  }
}

TEST_CASE("beam splitter and pi/2 pulse act as stated") {
  const StateVector4 s = u_bs() * StateVector4::basis(kG1);
  CHECK(s[kG1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s[kG2].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  const StateVector4 t = u_pi_half() * StateVector4::basis(kG1);
  CHECK(std::norm(t[kG1]) == doctest::Approx(0.5));
  CHECK(std::norm(t[kE1]) == doctest::Approx(0.5));
  // the lower-arm pi pulse leaves arm 1 alone and swaps g/e on arm 2
  const StateVector4 u = u_pi_lower() * StateVector4::basis(kG2);
  CHECK(std::norm(u[kE2]) == doctest::Approx(1.0));
  const StateVector4 v = u_pi_lower() * StateVector4::basis(kE1);
  CHECK(std::norm(v[kE1]) == doctest::Approx(1.0));
}

TEST_CASE("free-evolution phases") {
  SequenceParams p;
  p.T = 0.5;
  p.detuning = 3.0;
  p.lower_detuning = 1.0;
  p.epsilon = 0.2;
  const Unitary4 u = u_phase(p);
  CHECK(std::abs(u(kG1, kG1) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(u(kG2, kG2) - std::polar(1.0, -0.5)) < 1e-15);
  CHECK(std::abs(u(kE1, kE1) - std::polar(1.0, 3.2 * 0.5)) < 1e-15);
  CHECK(std::abs(u(kE2, kE2) - std::polar(1.0, 2.0 * 0.5)) < 1e-15);
  CHECK(std::abs(u(kG1, kG2)) == 0.0);
}

TEST_CASE("matrix product and closed forms agree over random draws") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const SequenceParams p = random_params(rng);
    const StateVector4 s = final_state(p);
    worst = std::max(worst, std::abs(p_upper_port(s) - closed_form_p1(p)));
    worst = std::max(worst, std::abs(p_ground(s) - closed_form_pg(p)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("printed convention is the matrix product with epsilon reversed") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    SequenceParams p = random_params(rng);
    const double p1 = closed_form_p1(p, SignConvention::printed);
    const double pg = closed_form_pg(p, SignConvention::printed);
    p.epsilon = -p.epsilon;
    CHECK(p1 == doctest::Approx(closed_form_p1(p, SignConvention::matrix_product)).epsilon(1e-12));
    CHECK(pg == doctest::Approx(closed_form_pg(p, SignConvention::matrix_product)).epsilon(1e-12));
  }
}

TEST_CASE("full unitary and state-vector path coincide") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const SequenceParams p = random_params(rng);
    const StateVector4 a = sequence_unitary(p) * StateVector4::basis(kG1);
    const StateVector4 b = final_state(p);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    CHECK(sequence_unitary(p).unitarity_residual() < 1e-12);
  }
}

TEST_CASE("norm and marginals") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const StateVector4 s = final_state(random_params(rng));
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p_upper_port(s) + p_lower_port(s) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p_ground(s) + p_excited(s) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("ground-state probability ignores the lower-state detuning") {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 50; ++k) {
    SequenceParams p = random_params(rng);
    const double ref = p_ground(final_state(p));
    for (double d = -kTwoPi * 1e4; d <= kTwoPi * 1e4; d += kTwoPi * 137.0) {
      p.lower_detuning = d;
      CHECK(std::abs(p_ground(final_state(p)) - ref) < 1e-12);
    }
  }
}

TEST_CASE("drive frequency only rotates the frame") {
  std::mt19937_64 rng(17);
  SequenceParams p = random_params(rng);
  const auto a = joint_probabilities(final_state(p));
  p.drive_frequency += 12345.678;
  const auto b = joint_probabilities(final_state(p));
  for (std::size_t i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("fringe amplitude in Delta is sin(T eps / 2)") {
  SequenceParams p;
  p.T = 10.0;
  p.epsilon = 3.5559e-3;
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 2000; ++k) {
    p.detuning = kTwoPi * 1000.0 + kTwoPi * k / (2000.0 * p.T);
    const double pg = p_ground(final_state(p));
    lo = std::min(lo, pg);
    hi = std::max(hi, pg);
  }
  CHECK(hi - lo == doctest::Approx(std::abs(visibility(p.T, p.epsilon))).epsilon(1e-4));
  p.epsilon = 0.0;
  CHECK(p_ground(final_state(p)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("port oscillation in delta has half-width port_amplitude") {
  SequenceParams p;
  p.T = 2.0;
  p.detuning = 1.3;
  p.epsilon = 0.05;
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 4000; ++k) {
    p.lower_detuning = kTwoPi * k / (4000.0 * p.T);
    const double p1 = p_upper_port(final_state(p));
    lo = std::min(lo, p1);
    hi = std::max(hi, p1);
  }
  CHECK((hi - lo) / 2.0 == doctest::Approx(port_amplitude(p)).epsilon(1e-5));
  CHECK((hi + lo) / 2.0 == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("without the lower-arm pi pulse the contrast is nearly full") {
  CHECK(visibility_no_pi_pulse(10.0, 3.5559e-3) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(visibility_no_pi_pulse(10.0, 3.5559e-3) < 1.0);
}

TEST_CASE("invalid input") {
  Unitary4::Matrix m{};
  m[0][0] = 2.0;
  CHECK_THROWS_AS(Unitary4{m}, InvalidInput);
  SequenceParams p;
  p.T = 0.0;
  CHECK_THROWS_AS(final_state(p), InvalidInput);
  p.T = 1.0;
  p.epsilon = std::nan("");
  CHECK_THROWS_AS(final_state(p), InvalidInput);
  CHECK_THROWS_AS(visibility(-1.0, 0.1), InvalidInput);
}

}
