#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "edsr/drive.hpp"
#include "edsr/spin_core.hpp"

namespace edsr {

enum class Frame { Rotating, Lab };

const char* to_string(Frame frame);
Frame frame_from_string(const std::string& text);

struct PropagationConfig {
  double dt = 0.0;  // s; 0 selects 1 / (steps_per_period * frame_bandwidth)
  double steps_per_period = 40.0;  // must be >= 20
  Frame frame = Frame::Rotating;
  bool record_trajectory = false;
  std::size_t trajectory_stride = 1000;
};

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double p_down = 0.0;
};

struct PropagationResult {
  DensityMatrix final_state;
  std::vector<TrajectorySample> trajectory;
  std::size_t steps = 0;
  double dt = 0.0;
};

/// Row-major 2x2 complex matrix.
using Matrix2 = std::array<cplx, 4>;

/// exp(-i H dt / hbar) for H = (h/2)(hx sx + hy sy + hz sz), with hx, hy, hz
/// in Hz.
Matrix2 step_unitary(double hx, double hy, double hz, double dt);

DensityMatrix apply_unitary(const Matrix2& u, const DensityMatrix& rho);

/// Fastest time variation of the Hamiltonian in the given frame, in Hz. The
/// step invariant is dt <= 1 / (20 * this).
double frame_bandwidth(const DriveProgram& program, double field, double g_factor, Frame frame);

/// Largest admissible step; +inf when the Hamiltonian is time independent.
double max_step(const DriveProgram& program, double field, double g_factor, Frame frame);

/// Step used when PropagationConfig::dt is zero.
double default_step(const DriveProgram& program, double field, double g_factor, Frame frame,
                    double steps_per_period = 40.0);

/// Frame rotating with the instantaneous carrier phase, rotating-wave
/// approximation. Each step applies the exact exponential of the fourth-order
/// Magnus exponent (Hamiltonian sampled at the two Gauss points of the step),
/// then phase damping over the step.
///
/// `overhauser` is a nuclear field seen by the electron only: it shifts the
/// electron Larmor frequency while the hyperfine tone offsets stay at
/// gamma * field.
PropagationResult propagate_rotating(const DensityMatrix& rho0, const DriveProgram& program,
                                     double field, const ElectronParams& electron,
                                     const PropagationConfig& cfg, double overhauser = 0.0);

/// Laboratory frame with the full cosine drive (no RWA). Same stepping
/// scheme as propagate_rotating.
PropagationResult propagate_lab(const DensityMatrix& rho0, const DriveProgram& program,
                                double field, const ElectronParams& electron,
                                const PropagationConfig& cfg, double overhauser = 0.0);

/// Dispatches on cfg.frame.
PropagationResult propagate(const DensityMatrix& rho0, const DriveProgram& program, double field,
                            const ElectronParams& electron, const PropagationConfig& cfg,
                            double overhauser = 0.0);

}  // namespace edsr
