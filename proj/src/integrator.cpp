#include "edsr/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace edsr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStepFactorLimit = 20.0;
// Tone phasors are advanced by complex multiplication and re-synchronised
// with the exact phase at this interval.
constexpr std::size_t kPhasorResync = 4096;

// Hermitian unit-trace state stored as (rho00, rho01).
struct HermitianState {
  double a;
  cplx b;

  static HermitianState from(const DensityMatrix& rho) {
    return {rho(0, 0).real(), 0.5 * (rho(0, 1) + std::conj(rho(1, 0)))};
  }
  DensityMatrix to_matrix() const { return {a, b, std::conj(b), 1.0 - a}; }
};

inline void rotate(HermitianState& s, const Matrix2& u) {
  const cplx bc = std::conj(s.b);
  const double d = 1.0 - s.a;
  const cplx t00 = u[0] * s.a + u[1] * bc;
  const cplx t01 = u[0] * s.b + u[1] * d;
  s.a = (t00 * std::conj(u[0]) + t01 * std::conj(u[1])).real();
  s.b = t00 * std::conj(u[2]) + t01 * std::conj(u[3]);
}

std::size_t step_count(double duration, double dt) {
  const double n = std::ceil(duration / dt * (1.0 - 1e-12));
  return static_cast<std::size_t>(std::max(1.0, n));
}

double resolve_step(const DriveProgram& program, double field, const ElectronParams& electron,
                    const PropagationConfig& cfg) {
  const double limit = max_step(program, field, electron.g_factor, cfg.frame);
  if (cfg.dt == 0.0) {
    if (!(cfg.steps_per_period >= kStepFactorLimit)) {
      throw std::invalid_argument("steps_per_period must be at least 20");
    }
    return default_step(program, field, electron.g_factor, cfg.frame, cfg.steps_per_period);
  }
  if (!(cfg.dt > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (cfg.dt > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("step size " + std::to_string(cfg.dt) +
                                " s exceeds the frame limit of " + std::to_string(limit) + " s");
  }
  return cfg.dt;
}

void check_inputs(const DensityMatrix& rho0, const DriveProgram& program,
                  const ElectronParams& electron, double field) {
  rho0.check_valid();
  program.validate();
  electron.validate();
  if (!(field >= 0.0) || !std::isfinite(field)) {
    throw std::invalid_argument("field must be finite and non-negative");
  }
}

double electron_field(double field, double overhauser) {
  const double total = field + overhauser;
  if (!(total >= 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("field plus Overhauser shift must be non-negative");
  }
  return total;
}

// Chirp frequency without the range checks of instantaneous_frequency.
struct ChirpEvaluator {
  double lo;
  double hi;
  double rate;
  double half;
  ChirpShape shape;

  explicit ChirpEvaluator(const ChirpSchedule& s)
      : lo(s.f_center - 0.5 * s.fm_depth),
        hi(s.f_center + 0.5 * s.fm_depth),
        rate(s.rate()),
        half(0.5 * s.duration),
        shape(s.shape) {}

  double operator()(double t) const {
    switch (shape) {
      case ChirpShape::Up:
        return lo + rate * t;
      case ChirpShape::Down:
        return hi - rate * t;
      case ChirpShape::Triangle:
        return t <= half ? lo + rate * t : hi - rate * (t - half);
    }
    return lo;
  }
};

struct Tone {
  double rabi;
  double offset;  // Hz
};

constexpr double kGaussNodes[2] = {0.5 - 0.28867513459481288225, 0.5 + 0.28867513459481288225};

double fractional_cycles(double frequency, double t) {
  const double cycles = frequency * t;
  return cycles - std::floor(cycles);
}

// Fourth-order Magnus exponent from the field vectors at the two Gauss nodes:
// h = (h1 + h2) / 2 + (sqrt(3) pi dt / 6) (h2 x h1).
inline void magnus4(const double* h1, const double* h2, double dt, double* out) {
  const double c = 0.90689968211710892529 * dt;  // sqrt(3) pi / 6
  out[0] = 0.5 * (h1[0] + h2[0]) + c * (h2[1] * h1[2] - h2[2] * h1[1]);
  out[1] = 0.5 * (h1[1] + h2[1]) + c * (h2[2] * h1[0] - h2[0] * h1[2]);
  out[2] = 0.5 * (h1[2] + h2[2]) + c * (h2[0] * h1[1] - h2[1] * h1[0]);
}

template <typename Coefficients>
PropagationResult run_steps(const DensityMatrix& rho0, double duration, double dt_request,
                            double t2, const PropagationConfig& cfg, Coefficients&& coefficients) {
  PropagationResult result;
  result.steps = step_count(duration, dt_request);
  result.dt = duration / static_cast<double>(result.steps);
  const double dt = result.dt;
  const double decay = std::exp(-dt / t2);
  const std::size_t stride = std::max<std::size_t>(1, cfg.trajectory_stride);

  HermitianState state = HermitianState::from(rho0);
  auto record = [&](double t) {
    const DensityMatrix rho = state.to_matrix();
    rho.check_valid();
    const BlochVector v = bloch_vector(rho);
    result.trajectory.push_back({t, v.x, v.y, v.z, rho.p_down()});
  };
  if (cfg.record_trajectory) record(0.0);

  double h[3];
  for (std::size_t k = 0; k < result.steps; ++k) {
    coefficients(k, dt, h);
    rotate(state, step_unitary(h[0], h[1], h[2], dt));
    state.b *= decay;
    if (cfg.record_trajectory && ((k + 1) % stride == 0 || k + 1 == result.steps)) {
      record(static_cast<double>(k + 1) * dt);
    }
  }
  result.final_state = state.to_matrix();
  result.final_state.check_valid(1e-10);
  return result;
}

// Bloch-space matrix of one constant-Hamiltonian step followed by damping.
using Matrix3 = std::array<double, 9>;

Matrix3 multiply(const Matrix3& a, const Matrix3& b) {
  Matrix3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return c;
}

PropagationResult run_constant(const DensityMatrix& rho0, double duration, double dt_request,
                               double t2, const double h[3]) {
  PropagationResult result;
  result.steps = step_count(duration, dt_request);
  result.dt = duration / static_cast<double>(result.steps);
  const Matrix2 u = step_unitary(h[0], h[1], h[2], result.dt);
  const double decay = std::exp(-result.dt / t2);

  // Columns are the images of the unit Bloch vectors; the channel is unital.
  Matrix3 step{};
  const BlochVector basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int j = 0; j < 3; ++j) {
    HermitianState s = HermitianState::from(DensityMatrix::from_bloch(basis[j]));
    rotate(s, u);
    s.b *= decay;
    const BlochVector v = bloch_vector(s.to_matrix());
    step[j] = v.x;
    step[3 + j] = v.y;
    step[6 + j] = v.z;
  }
  Matrix3 total{1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (std::size_t n = result.steps; n > 0; n >>= 1) {
    if (n & 1U) total = multiply(step, total);
    step = multiply(step, step);
  }
  const BlochVector v0 = bloch_vector(rho0);
  const BlochVector v{total[0] * v0.x + total[1] * v0.y + total[2] * v0.z,
                      total[3] * v0.x + total[4] * v0.y + total[5] * v0.z,
                      total[6] * v0.x + total[7] * v0.y + total[8] * v0.z};
  result.final_state = DensityMatrix::from_bloch(v);
  result.final_state.check_valid(1e-10);
  return result;
}

}  // namespace

const char* to_string(Frame frame) { return frame == Frame::Lab ? "lab" : "rotating"; }

Frame frame_from_string(const std::string& text) {
  if (text == "rotating") return Frame::Rotating;
  if (text == "lab") return Frame::Lab;
  throw std::invalid_argument("unknown frame '" + text + "'");
}

Matrix2 step_unitary(double hx, double hy, double hz, double dt) {
  const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
  if (norm == 0.0) {
    return {1.0, 0.0, 0.0, 1.0};
  }
  const double theta = std::numbers::pi * dt * norm;
  const double c = std::cos(theta);
  const double s = std::sin(theta) / norm;
  const double nx = s * hx;
  const double ny = s * hy;
  const double nz = s * hz;
  return {cplx(c, -nz), cplx(-ny, -nx), cplx(ny, -nx), cplx(c, nz)};
}

DensityMatrix apply_unitary(const Matrix2& u, const DensityMatrix& rho) {
  DensityMatrix out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) acc += u[2 * i + k] * rho(k, l) * std::conj(u[2 * j + l]);
      out(i, j) = acc;
    }
  }
  return out;
}

double frame_bandwidth(const DriveProgram& program, double field, double g_factor, Frame frame) {
  const double offset = program.max_active_offset(field);
  if (frame == Frame::Lab) {
    const double top = program.schedule.f_center + 0.5 * program.schedule.fm_depth + offset;
    return std::max(field_to_larmor(field, g_factor), top);
  }
  if (offset == 0.0 && program.schedule.fm_depth == 0.0) return 0.0;
  return offset + 0.5 * program.schedule.fm_depth;
}

double max_step(const DriveProgram& program, double field, double g_factor, Frame frame) {
  const double bandwidth = frame_bandwidth(program, field, g_factor, frame);
  if (bandwidth == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kStepFactorLimit * bandwidth);
}

double default_step(const DriveProgram& program, double field, double g_factor, Frame frame,
                    double steps_per_period) {
  const double bandwidth = frame_bandwidth(program, field, g_factor, frame);
  if (bandwidth > 0.0) return 1.0 / (steps_per_period * bandwidth);
  // Time-independent Hamiltonian: any step is exact; resolve the Rabi motion
  // so recorded trajectories are smooth.
  double rabi = program.rabi_so;
  for (const auto& s : program.species) rabi += s.rabi_hf;
  const double scale = std::max(rabi, 1.0 / program.schedule.duration);
  return std::min(program.schedule.duration, 1.0 / (steps_per_period * scale));
}

PropagationResult propagate_rotating(const DensityMatrix& rho0, const DriveProgram& program,
                                     double field, const ElectronParams& electron,
                                     const PropagationConfig& cfg, double overhauser) {
  if (cfg.frame != Frame::Rotating) {
    throw std::invalid_argument("propagate_rotating called with a lab-frame config");
  }
  check_inputs(rho0, program, electron, field);
  const double dt_request = resolve_step(program, field, electron, cfg);
  const double f_larmor = field_to_larmor(electron_field(field, overhauser), electron.g_factor);
  const ChirpSchedule& schedule = program.schedule;

  if (schedule.fm_depth == 0.0 && !program.has_active_hyperfine() && !cfg.record_trajectory) {
    const double h[3] = {program.rabi_so, 0.0, f_larmor - schedule.f_center};
    return run_constant(rho0, schedule.duration, dt_request, electron.t2, h);
  }

  const ChirpEvaluator chirp(schedule);
  std::vector<Tone> tones;
  for (const auto& s : program.species) {
    if (s.rabi_hf > 0.0) tones.push_back({s.rabi_hf, s.gamma * field});
  }
  // Phasors of each tone at the two Gauss nodes of the current step.
  std::vector<cplx> phasors(2 * tones.size());
  std::vector<cplx> advance(tones.size());
  auto coefficients = [&](std::size_t k, double dt, double* h) {
    const double t0 = static_cast<double>(k) * dt;
    if (k % kPhasorResync == 0) {
      for (std::size_t i = 0; i < tones.size(); ++i) {
        for (int node = 0; node < 2; ++node) {
          phasors[2 * i + node] = std::polar(1.0, kTwoPi * fractional_cycles(
                                                      tones[i].offset, t0 + kGaussNodes[node] * dt));
        }
        advance[i] = std::polar(1.0, kTwoPi * fractional_cycles(tones[i].offset, dt));
      }
    }
    double nodes[2][3];
    for (int node = 0; node < 2; ++node) {
      double hx = program.rabi_so;
      double hy = 0.0;
      for (std::size_t i = 0; i < tones.size(); ++i) {
        cplx& z = phasors[2 * i + node];
        hx += tones[i].rabi * z.real();
        hy += tones[i].rabi * z.imag();
        z *= advance[i];
      }
      nodes[node][0] = hx;
      nodes[node][1] = hy;
      nodes[node][2] = f_larmor - chirp(t0 + kGaussNodes[node] * dt);
    }
    magnus4(nodes[0], nodes[1], dt, h);
  };
  return run_steps(rho0, schedule.duration, dt_request, electron.t2, cfg, coefficients);
}

PropagationResult propagate_lab(const DensityMatrix& rho0, const DriveProgram& program,
                                double field, const ElectronParams& electron,
                                const PropagationConfig& cfg, double overhauser) {
  if (cfg.frame != Frame::Lab) {
    throw std::invalid_argument("propagate_lab called with a rotating-frame config");
  }
  check_inputs(rho0, program, electron, field);
  const double dt_request = resolve_step(program, field, electron, cfg);
  const double f_larmor = field_to_larmor(electron_field(field, overhauser), electron.g_factor);
  const ChirpSchedule& schedule = program.schedule;

  std::vector<Tone> tones;
  for (const auto& s : program.species) {
    if (s.rabi_hf > 0.0) tones.push_back({s.rabi_hf, s.gamma * field});
  }
  auto lab_field = [&](double t, double* h) {
    const double cycles = carrier_cycles(schedule, std::min(t, schedule.duration));
    const double carrier = cycles - std::floor(cycles);
    double drive = program.rabi_so * std::cos(kTwoPi * carrier);
    for (const auto& tone : tones) {
      drive += tone.rabi * std::cos(kTwoPi * (carrier + fractional_cycles(tone.offset, t)));
    }
    h[0] = -2.0 * drive;
    h[1] = 0.0;
    h[2] = -f_larmor;
  };
  auto coefficients = [&](std::size_t k, double dt, double* h) {
    const double t0 = static_cast<double>(k) * dt;
    double nodes[2][3];
    lab_field(t0 + kGaussNodes[0] * dt, nodes[0]);
    lab_field(t0 + kGaussNodes[1] * dt, nodes[1]);
    magnus4(nodes[0], nodes[1], dt, h);
  };
  return run_steps(rho0, schedule.duration, dt_request, electron.t2, cfg, coefficients);
}

PropagationResult propagate(const DensityMatrix& rho0, const DriveProgram& program, double field,
                            const ElectronParams& electron, const PropagationConfig& cfg,
                            double overhauser) {
  return cfg.frame == Frame::Lab
             ? propagate_lab(rho0, program, field, electron, cfg, overhauser)
             : propagate_rotating(rho0, program, field, electron, cfg, overhauser);
}

}  // namespace edsr
