#include "tcs/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>

#include "tcs/errors.hpp"

namespace tcs::tdse {

namespace {

constexpr double kPi = std::numbers::pi;

// fftw planning is not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex transform pair over an fftw-aligned buffer.
class FftBuffer {
 public:
  explicit FftBuffer(std::size_t n) : n_(n) {
    data_ = fftw_alloc_complex(n);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  ~FftBuffer() {
    {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(data_);
  }

  std::span<Complex> data() { return {reinterpret_cast<Complex*>(data_), n_}; }
  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }  // unnormalised

 private:
  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// Protocol and grid in hbar = m = 1 units with lengths in sigma.
struct Reduced {
  double length = 0.0;  // m per unit
  double energy = 0.0;  // J per unit
  double time = 0.0;    // s per unit

  double v0 = 0.0;
  double slope = 0.0;  // linear potential coefficient per unit length
  double d_max = 0.0;
  double d_min = 0.0;
  double delta_max = 0.0;
  double t_split = 0.0;

  std::size_t n = 0;
  double x_min = 0.0;
  double dx = 0.0;
  std::vector<double> x;
  std::vector<double> k2_half;  // k^2 / 2

  Reduced(const TrapProtocol& p, const Grid1D& grid) {
    p.validate();
    grid.validate(p);
    length = p.sigma;
    energy = kConstants.hbar * kConstants.hbar / (p.mass * p.sigma * p.sigma);
    time = kConstants.hbar / energy;
    v0 = p.v0 / energy;
    const double force = (p.gravity ? p.mass * p.g : 0.0) + p.compensation_gradient;
    slope = force * length / energy;
    d_max = p.d_max / length;
    d_min = p.d_min / length;
    delta_max = p.delta_max;
    t_split = p.t_split / time;

    n = grid.n_points;
    x_min = grid.x_min / length;
    dx = grid.dx() / length;
    x.resize(n);
    k2_half.resize(n);
    const double dk = 2.0 * kPi / (dx * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = x_min + static_cast<double>(i) * dx;
      const double k = dk * (i < n / 2 ? static_cast<double>(i)
                                       : static_cast<double>(i) - static_cast<double>(n));
      k2_half[i] = 0.5 * k * k;
    }
  }

  double separation(double t) const {
    return 0.5 * (d_max + d_min) + 0.5 * (d_max - d_min) * std::cos(2.0 * kPi * t / t_split);
  }
  double detuning(double t) const {
    return t < 0.5 * t_split ? delta_max * (1.0 - 2.0 * t / t_split) : 0.0;
  }

  // Potential at protocol time t. Returns the minimum sample.
  //
  // Each Gaussian is generated by the recurrence G(y + dx) = G(y) exp(-4 y dx - 2 dx^2),
  // restarted from a direct evaluation every kResync samples.
  double fill_potential(double t, std::span<double> out) const {
    const double half_d = 0.5 * separation(t);
    const double shallow = 1.0 - detuning(t);
    const double curvature = std::exp(-4.0 * dx * dx);
    constexpr std::size_t kResync = 256;
    double vmin = 0.0;
    for (std::size_t start = 0; start < n; start += kResync) {
      const std::size_t stop = std::min(n, start + kResync);
      const double yu = x[start] - half_d;
      const double yd = x[start] + half_d;
      double gu = std::exp(-2.0 * yu * yu);
      double gd = std::exp(-2.0 * yd * yd);
      double ru = std::exp(-4.0 * yu * dx - 2.0 * dx * dx);
      double rd = std::exp(-4.0 * yd * dx - 2.0 * dx * dx);
      for (std::size_t i = start; i < stop; ++i) {
        const double v = -v0 * (gu + shallow * gd) + slope * x[i];
        out[i] = v;
        vmin = i == 0 ? v : std::min(vmin, v);
        gu *= ru;
        gd *= rd;
        ru *= curvature;
        rd *= curvature;
      }
    }
    return vmin;
  }

  double harmonic_frequency() const { return std::sqrt(4.0 * v0); }
};

double sq_norm(std::span<const Complex> psi, double dx) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s * dx;
}

void scale(std::span<Complex> psi, double factor) {
  for (auto& a : psi) a *= factor;
}

// Applies H = k^2/2 + V to psi, result in hpsi. Uses fft as scratch.
void apply_hamiltonian(const Reduced& r, std::span<const double> v, std::span<const Complex> psi,
                       std::span<Complex> hpsi, FftBuffer& fft) {
  auto buf = fft.data();
  std::copy(psi.begin(), psi.end(), buf.begin());
  fft.forward();
  const double inv_n = 1.0 / static_cast<double>(r.n);
  for (std::size_t i = 0; i < r.n; ++i) buf[i] *= r.k2_half[i] * inv_n;
  fft.backward();
  for (std::size_t i = 0; i < r.n; ++i) hpsi[i] = buf[i] + v[i] * psi[i];
}

double energy_of(const Reduced& r, std::span<const double> v, std::span<const Complex> psi,
                 std::vector<Complex>& scratch, FftBuffer& fft) {
  scratch.resize(r.n);
  apply_hamiltonian(r, v, psi, scratch, fft);
  Complex e{};
  for (std::size_t i = 0; i < r.n; ++i) e += std::conj(psi[i]) * scratch[i];
  return e.real() / sq_norm(psi, 1.0);
}

// Symmetric imaginary-time split step: exp(-K dtau/2) exp(-V dtau) exp(-K dtau/2).
class ImaginaryStepper {
 public:
  ImaginaryStepper(const Reduced& r, std::span<const double> v, double vmin, double dtau)
      : r_(r), kin_(r.n), pot_(r.n) {
    const double inv_n = 1.0 / static_cast<double>(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
      kin_[i] = std::exp(-0.5 * dtau * r.k2_half[i]) * inv_n;
      pot_[i] = std::exp(-dtau * (v[i] - vmin));
    }
  }

  void apply(std::span<Complex> psi, FftBuffer& fft) const {
    auto buf = fft.data();
    std::copy(psi.begin(), psi.end(), buf.begin());
    fft.forward();
    for (std::size_t i = 0; i < r_.n; ++i) buf[i] *= kin_[i];
    fft.backward();
    for (std::size_t i = 0; i < r_.n; ++i) buf[i] *= pot_[i];
    fft.forward();
    for (std::size_t i = 0; i < r_.n; ++i) buf[i] *= kin_[i] * static_cast<double>(r_.n);
    fft.backward();
    const double inv_n = 1.0 / static_cast<double>(r_.n);
    for (std::size_t i = 0; i < r_.n; ++i) psi[i] = buf[i] * inv_n;
  }

 private:
  const Reduced& r_;
  std::vector<double> kin_;
  std::vector<double> pot_;
};

// Trial state that already matches the harmonic ground state of every well:
// exp(-(V - Vmin) / omega) ~ exp(-omega x^2 / 2) near each minimum.
std::vector<Complex> trial_state(const Reduced& r, std::span<const double> v, double vmin) {
  const double w = r.harmonic_frequency();
  std::vector<Complex> psi(r.n);
  for (std::size_t i = 0; i < r.n; ++i) psi[i] = std::exp(-(v[i] - vmin) / w);
  scale(psi, 1.0 / std::sqrt(sq_norm(psi, r.dx)));
  return psi;
}

GroundState relax(const Reduced& r, double t, const GroundStateOptions& options) {
  std::vector<double> v(r.n);
  const double vmin = r.fill_potential(t, v);
  auto psi = trial_state(r, v, vmin);
  FftBuffer fft(r.n);
  std::vector<Complex> scratch;

  const double w = r.harmonic_frequency();
  const double tol = options.tolerance * r.v0;
  // Coarse stage removes excited components quickly; the fine stage settles the
  // splitting bias at a step comparable to the real-time step.
  const double stages[] = {0.05 / w, 0.005 / w};
  constexpr std::size_t kCheckEvery = 10;

  std::size_t total = 0;
  double energy = energy_of(r, v, psi, scratch, fft);
  for (const double dtau : stages) {
    ImaginaryStepper stepper(r, v, vmin, dtau);
    bool converged = false;
    while (total < options.max_steps) {
      for (std::size_t s = 0; s < kCheckEvery; ++s) {
        stepper.apply(psi, fft);
        scale(psi, 1.0 / std::sqrt(sq_norm(psi, r.dx)));
      }
      total += kCheckEvery;
      const double e = energy_of(r, v, psi, scratch, fft);
      const double change = std::abs(e - energy) / static_cast<double>(kCheckEvery);
      energy = e;
      if (change < tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw SolverError("imaginary-time relaxation did not converge within " +
                        std::to_string(options.max_steps) + " steps");
    }
  }

  GroundState out;
  out.psi = WaveFunction1D{std::move(psi), r.x_min * r.length, r.dx * r.length};
  // Continuum normalisation in SI lengths.
  scale(out.psi.samples, 1.0 / std::sqrt(r.length));
  out.energy = energy * r.energy;
  out.steps = total;
  return out;
}

// Reduced-unit samples with unit discrete norm (sum |psi|^2 dx_reduced = 1).
std::vector<Complex> to_reduced(const WaveFunction1D& psi, const Reduced& r) {
  std::vector<Complex> out(psi.samples);
  scale(out, std::sqrt(r.length));
  return out;
}

WaveFunction1D from_reduced(std::span<const Complex> psi, const Reduced& r) {
  WaveFunction1D out{{psi.begin(), psi.end()}, r.x_min * r.length, r.dx * r.length};
  scale(out.samples, 1.0 / std::sqrt(r.length));
  return out;
}

}  // namespace

void TrapProtocol::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(v0) || !positive(sigma) || !positive(t_split) || !positive(mass)) {
    throw InvalidInput("trap protocol: v0, sigma, t_split and mass must be positive");
  }
  if (!(d_max > d_min) || !(d_min > 0.0)) {
    throw InvalidInput("trap protocol: require d_max > d_min > 0");
  }
  if (!(delta_max >= 0.0 && delta_max < 1.0)) {
    throw InvalidInput("trap protocol: require 0 <= delta_max < 1");
  }
  if (!std::isfinite(compensation_gradient) || !std::isfinite(g)) {
    throw InvalidInput("trap protocol: gradient and g must be finite");
  }
}

TrapProtocol default_protocol() {
  const auto atom = ytterbium171();
  const auto trap = default_tweezer();
  TrapProtocol p;
  p.mass = atom.mass;
  p.sigma = trap.waist;
  // 10 uK rather than the clock-tweezer 300 uK: the merge of the wells has a
  // gap of only ~10-40 hbar^2/(m sigma^2) at any depth, so the split needs
  // ~0.5 s, and the step count scales with V0.
  p.v0 = 10e-6 * kConstants.kB;
  p.d_max = 5.0 * p.sigma;
  // At d_min >~ 1.05 sigma the barrier never opens and nothing tunnels.
  p.d_min = 0.4 * p.sigma;
  // Just below the crossing of the shallow well's ground level with the
  // deep well's first vibrational level: Delta_max V0 = 0.9 hbar omega.
  const double omega = std::sqrt(4.0 * p.v0 / (p.mass * p.sigma * p.sigma));
  p.delta_max = 0.9 * kConstants.hbar * omega / p.v0;
  p.t_split = 0.5;
  p.gravity = false;
  return p;
}

void Grid1D::validate(const TrapProtocol& p) const {
  if (n_points < 16 || !std::has_single_bit(n_points)) {
    throw InvalidInput("grid: n_points must be a power of two >= 16");
  }
  if (!(x_max > x_min)) {
    throw InvalidInput("grid: x_max must exceed x_min");
  }
  const double margin = 3.0 * p.sigma;
  if (x_min > -(0.5 * p.d_max + margin) || x_max < 0.5 * p.d_max + margin) {
    throw InvalidInput("grid: domain must cover d_max plus a 6 sigma margin");
  }
  const double dt_bound = 2.0 * kPi * kConstants.hbar / (10.0 * p.v0);
  if (!(dt > 0.0) || !(dt < dt_bound)) {
    throw InvalidInput("grid: dt must satisfy 0 < dt < 2 pi hbar / (10 V0)");
  }
}

Grid1D default_grid(const TrapProtocol& p, std::size_t n_points) {
  const double half = std::max(6.0 * p.sigma, 0.5 * p.d_max + 3.5 * p.sigma);
  const double dt_bound = 2.0 * kPi * kConstants.hbar / (10.0 * p.v0);
  return Grid1D{-half, half, n_points, 0.9 * dt_bound};
}

double WaveFunction1D::norm() const { return sq_norm(samples, dx); }

Complex overlap(const WaveFunction1D& a, const WaveFunction1D& b) {
  if (a.samples.size() != b.samples.size()) {
    throw InvalidInput("overlap: wavefunctions live on different grids");
  }
  Complex s{};
  for (std::size_t i = 0; i < a.samples.size(); ++i) s += std::conj(a.samples[i]) * b.samples[i];
  return s * a.dx;
}

double separation_schedule(double t, const TrapProtocol& p) {
  if (!(t >= 0.0 && t <= p.t_split)) {
    throw InvalidInput("separation_schedule: t outside [0, t_split]");
  }
  return 0.5 * (p.d_max + p.d_min) + 0.5 * (p.d_max - p.d_min) * std::cos(2.0 * kPi * t / p.t_split);
}

double detuning_schedule(double t, const TrapProtocol& p) {
  if (!(t >= 0.0 && t <= p.t_split)) {
    throw InvalidInput("detuning_schedule: t outside [0, t_split]");
  }
  return t < 0.5 * p.t_split ? p.delta_max * (1.0 - 2.0 * t / p.t_split) : 0.0;
}

double potential(double x, double t, const TrapProtocol& p) {
  const double d = separation_schedule(t, p);
  const double delta = detuning_schedule(t, p);
  const double s2 = p.sigma * p.sigma;
  const double up = x - 0.5 * d;
  const double down = x + 0.5 * d;
  double v = -p.v0 * (std::exp(-2.0 * up * up / s2) + (1.0 - delta) * std::exp(-2.0 * down * down / s2));
  if (p.gravity) v += p.mass * p.g * x;
  return v + p.compensation_gradient * x;
}

GroundState ground_state(const TrapProtocol& p, const Grid1D& grid, const GroundStateOptions& options) {
  return instantaneous_ground_state(p, grid, 0.0, options);
}

GroundState instantaneous_ground_state(const TrapProtocol& p, const Grid1D& grid, double t,
                                       const GroundStateOptions& options) {
  const Reduced r(p, grid);
  return relax(r, t / r.time, options);
}

Trajectory evolve(const WaveFunction1D& psi0, const TrapProtocol& p, const Grid1D& grid,
                  const EvolveOptions& options) {
  const Reduced r(p, grid);
  if (psi0.samples.size() != r.n) {
    throw InvalidInput("evolve: initial state does not match the grid");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-8) {
    throw InvalidInput("evolve: initial state is not normalised");
  }
  if (options.n_snapshots < 2) {
    throw InvalidInput("evolve: need at least two snapshots");
  }

  const auto steps = static_cast<std::size_t>(std::ceil(p.t_split / grid.dt));
  const double dt = r.t_split / static_cast<double>(steps);
  const bool reversed = options.direction == Direction::reversed;
  auto protocol_time = [&](double elapsed) { return reversed ? r.t_split - elapsed : elapsed; };

  std::vector<std::size_t> marks(options.n_snapshots);
  for (std::size_t k = 0; k < marks.size(); ++k) {
    marks[k] = (k * steps + (marks.size() - 1) / 2) / (marks.size() - 1);
  }

  Trajectory traj;
  traj.direction = options.direction;
  traj.steps = steps;
  traj.dt = dt * r.time;

  auto record = [&](std::size_t step, std::span<const Complex> psi) {
    const double elapsed = static_cast<double>(step) * dt;
    const double tp = protocol_time(elapsed);
    Snapshot snap;
    snap.t = elapsed * r.time;
    snap.separation = r.separation(tp) * r.length;
    snap.detuning = r.detuning(tp);
    snap.psi = from_reduced(psi, r);
    const double drift = std::abs(snap.psi.norm() - 1.0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > options.abort_drift) {
      throw StabilityError("evolve: norm drift " + std::to_string(drift) +
                           " exceeds bound; reduce dt");
    }
    traj.snapshots.push_back(std::move(snap));
  };

  FftBuffer fft(r.n);
  auto buf = fft.data();
  std::vector<Complex> psi = to_reduced(psi0, r);
  const double inv_n = 1.0 / static_cast<double>(r.n);
  std::vector<Complex> kinetic(r.n);
  std::vector<Complex> kinetic_last(r.n);
  for (std::size_t i = 0; i < r.n; ++i) {
    kinetic[i] = std::polar(1.0, -0.5 * dt * r.k2_half[i]);
    kinetic_last[i] = kinetic[i] * inv_n;
  }

  // exp(-i V dt) is advanced multiplicatively from the previous step's phase;
  // the increment (V_new - V_old) dt is tiny, so a short series is exact to
  // rounding. A full evaluation every kPhaseResync steps stops drift.
  constexpr std::size_t kPhaseResync = 512;
  constexpr double kSeriesLimit = 1e-3;
  std::vector<double> v(r.n);
  std::vector<double> v_prev(r.n);
  std::vector<Complex> phase(r.n);
  auto full_phase = [&]() {
    for (std::size_t i = 0; i < r.n; ++i) phase[i] = std::polar(1.0, -dt * v[i]);
  };
  auto advance_phase = [&]() {
    for (std::size_t i = 0; i < r.n; ++i) {
      const double d = dt * (v[i] - v_prev[i]);
      if (std::abs(d) > kSeriesLimit) {
        phase[i] = std::polar(1.0, -dt * v[i]);
        continue;
      }
      const double d2 = d * d;
      phase[i] *= Complex(1.0 - 0.5 * d2 * (1.0 - d2 / 12.0), -d * (1.0 - d2 / 6.0));
    }
  };

  record(0, psi);
  std::size_t next_mark = 1;
  std::copy(psi.begin(), psi.end(), buf.begin());
  fft.forward();
  for (std::size_t i = 0; i < r.n; ++i) buf[i] *= inv_n;
  for (std::size_t s = 0; s < steps; ++s) {
    // psi stays in momentum space between steps.
    for (std::size_t i = 0; i < r.n; ++i) buf[i] *= kinetic[i];
    fft.backward();
    r.fill_potential(protocol_time((static_cast<double>(s) + 0.5) * dt), v);
    if (s % kPhaseResync == 0) {
      full_phase();
    } else {
      advance_phase();
    }
    std::swap(v, v_prev);
    for (std::size_t i = 0; i < r.n; ++i) buf[i] *= phase[i];
    fft.forward();
    for (std::size_t i = 0; i < r.n; ++i) buf[i] *= kinetic_last[i];

    while (next_mark < marks.size() && marks[next_mark] == s + 1) {
      std::copy(buf.begin(), buf.end(), psi.begin());
      fft.backward();
      record(s + 1, buf);
      std::copy(psi.begin(), psi.end(), buf.begin());
      ++next_mark;
    }
  }
  return traj;
}

ArmPopulations arm_populations(const WaveFunction1D& psi) {
  ArmPopulations out;
  const std::size_t n = psi.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = psi.x_min + static_cast<double>(i) * psi.dx;
    const double w = std::norm(psi.samples[i]) * psi.dx;
    if (std::abs(x) < 0.5 * psi.dx) {
      out.upper += 0.5 * w;
      out.lower += 0.5 * w;
    } else if (x > 0.0) {
      out.upper += w;
    } else {
      out.lower += w;
    }
  }
  return out;
}

AdiabaticityReport adiabaticity(const Trajectory& trajectory, const TrapProtocol& p,
                                const Grid1D& grid, const AdiabaticityOptions& options) {
  if (trajectory.snapshots.empty()) {
    throw InvalidInput("adiabaticity: empty trajectory");
  }
  const Reduced r(p, grid);
  const bool reversed = trajectory.direction == Direction::reversed;
  FftBuffer fft(r.n);
  std::vector<double> v(r.n);
  std::vector<Complex> a;
  std::vector<Complex> b;
  const double dtau = 0.05 / r.harmonic_frequency();
  constexpr std::size_t kCheckEvery = 20;

  auto orthonormalise = [&]() {
    scale(a, 1.0 / std::sqrt(sq_norm(a, r.dx)));
    Complex proj{};
    for (std::size_t i = 0; i < r.n; ++i) proj += std::conj(a[i]) * b[i];
    proj *= r.dx;
    for (std::size_t i = 0; i < r.n; ++i) b[i] -= proj * a[i];
    scale(b, 1.0 / std::sqrt(sq_norm(b, r.dx)));
  };
  auto span_population = [&](std::span<const Complex> psi) {
    Complex pa{};
    Complex pb{};
    for (std::size_t i = 0; i < r.n; ++i) {
      pa += std::conj(a[i]) * psi[i];
      pb += std::conj(b[i]) * psi[i];
    }
    return (std::norm(pa) + std::norm(pb)) * r.dx * r.dx;
  };

  AdiabaticityReport report;
  for (const auto& snap : trajectory.snapshots) {
    const double elapsed = snap.t / r.time;
    const double tp = reversed ? r.t_split - elapsed : elapsed;
    const double vmin = r.fill_potential(std::clamp(tp, 0.0, r.t_split), v);
    if (a.empty()) {
      a = trial_state(r, v, vmin);
      b = a;
      double centre = 0.0;
      for (std::size_t i = 0; i < r.n; ++i) centre += r.x[i] * std::norm(a[i]) * r.dx;
      for (std::size_t i = 0; i < r.n; ++i) b[i] *= (r.x[i] - centre);
      orthonormalise();
    }
    const auto psi = to_reduced(snap.psi, r);
    ImaginaryStepper stepper(r, v, vmin, dtau);

    double last = span_population(psi);
    bool converged = false;
    for (std::size_t it = 0; it < options.max_iterations; it += kCheckEvery) {
      for (std::size_t s = 0; s < kCheckEvery; ++s) {
        stepper.apply(a, fft);
        stepper.apply(b, fft);
        orthonormalise();
      }
      const double pop = span_population(psi);
      if (std::abs(pop - last) < options.tolerance) {
        last = pop;
        converged = true;
        break;
      }
      last = pop;
    }
    if (!converged) {
      throw SolverError("adiabaticity: eigen-subspace iteration did not converge");
    }
    const double pop = std::clamp(last, 0.0, 1.0);
    report.per_snapshot.push_back(pop);
    report.min_overlap = std::min(report.min_overlap, pop);
  }
  return report;
}

SplitResult run_splitter(const TrapProtocol& p, const Grid1D& grid, std::size_t n_snapshots,
                         bool with_adiabaticity) {
  SplitResult out;
  out.initial = ground_state(p, grid).psi;
  EvolveOptions opts;
  opts.n_snapshots = n_snapshots;
  out.trajectory = evolve(out.initial, p, grid, opts);
  out.populations = arm_populations(out.trajectory.snapshots.back().psi);
  out.max_norm_drift = out.trajectory.max_norm_drift;
  if (with_adiabaticity) {
    out.adiabatic_overlap = adiabaticity(out.trajectory, p, grid).min_overlap;
  }
  return out;
}

double combiner_return_overlap(const SplitResult& split, const TrapProtocol& p,
                               const Grid1D& grid) {
  if (split.trajectory.snapshots.empty()) throw InvalidInput("combiner: empty trajectory");
  EvolveOptions opts;
  opts.n_snapshots = 2;
  opts.direction = Direction::reversed;
  const auto back = evolve(split.trajectory.snapshots.back().psi, p, grid, opts);
  return std::norm(overlap(split.initial, back.snapshots.back().psi));
}

std::vector<ArmPopulations> sweep_final_populations(std::span<const TrapProtocol> protocols,
                                                    std::size_t n_points) {
  std::vector<ArmPopulations> out(protocols.size());
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(protocols.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& p = protocols[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] =
          run_splitter(p, default_grid(p, n_points), 2, false).populations;
    } catch (...) {
#pragma omp critical(tcs_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<ArmPopulations> sweep_final_populations_serial(
    std::span<const TrapProtocol> protocols, std::size_t n_points) {
  std::vector<ArmPopulations> out;
  out.reserve(protocols.size());
  for (const auto& p : protocols) {
    out.push_back(run_splitter(p, default_grid(p, n_points), 2, false).populations);
  }
  return out;
}

}  // namespace tcs::tdse
