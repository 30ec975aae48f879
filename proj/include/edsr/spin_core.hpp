#pragma once

#include <array>
#include <complex>
#include <limits>
#include <numbers>

namespace edsr {

using cplx = std::complex<double>;

// CODATA 2018 exact / recommended values.
namespace constants {
inline constexpr double h = 6.62607015e-34;        // J s
inline constexpr double hbar = h / (2.0 * std::numbers::pi);
inline constexpr double mu_B = 9.2740100783e-24;   // J/T
}  // namespace constants

// Tolerance used for all state invariants.
inline constexpr double kStateTolerance = 1e-12;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Spin-1/2 density matrix in the basis (|up>, |down>). |up> is the ground
/// state at positive field; P_down is element (1,1).
class DensityMatrix {
 public:
  DensityMatrix() : m_{1.0, 0.0, 0.0, 0.0} {}
  DensityMatrix(cplx m00, cplx m01, cplx m10, cplx m11) : m_{m00, m01, m10, m11} {}

  static DensityMatrix spin_up() { return {}; }
  static DensityMatrix spin_down() { return {0.0, 0.0, 0.0, 1.0}; }
  static DensityMatrix maximally_mixed() { return {0.5, 0.0, 0.0, 0.5}; }
  static DensityMatrix from_bloch(const BlochVector& b);

  cplx operator()(int row, int col) const { return m_[2 * row + col]; }
  cplx& operator()(int row, int col) { return m_[2 * row + col]; }

  double p_down() const { return m_[3].real(); }
  double p_up() const { return m_[0].real(); }
  cplx trace() const { return m_[0] + m_[3]; }
  double purity() const;

  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

  /// True when Hermiticity, unit trace, positivity and the purity bound all
  /// hold to within tol.
  bool is_valid(double tol = kStateTolerance) const;

  /// Throws std::invalid_argument naming the first violated invariant.
  void check_valid(double tol = kStateTolerance) const;

 private:
  std::array<cplx, 4> m_;
};

struct ElectronParams {
  double g_factor = -0.339;
  double t2 = 100e-6;  // s; +inf disables dephasing

  void validate() const;
};

BlochVector bloch_vector(const DensityMatrix& rho);

/// Multiplies the coherences by exp(-dt/t2). Populations are untouched.
DensityMatrix apply_phase_damping(const DensityMatrix& rho, double dt, double t2);

/// |g| mu_B B / h, in Hz.
double field_to_larmor(double field, double g_factor);

/// Inverse of field_to_larmor.
double larmor_to_field(double frequency, double g_factor);

/// |g| mu_B / h in Hz/T.
double larmor_per_tesla(double g_factor);

}  // namespace edsr
