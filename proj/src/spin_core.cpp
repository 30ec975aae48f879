#include "edsr/spin_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edsr {

DensityMatrix DensityMatrix::from_bloch(const BlochVector& b) {
  return {0.5 * (1.0 + b.z), cplx(0.5 * b.x, -0.5 * b.y), cplx(0.5 * b.x, 0.5 * b.y),
          0.5 * (1.0 - b.z)};
}

double DensityMatrix::purity() const {
  return std::norm(m_[0]) + std::norm(m_[3]) + std::norm(m_[1]) + std::norm(m_[2]);
}

double DensityMatrix::min_eigenvalue() const {
  const double a = m_[0].real();
  const double d = m_[3].real();
  const cplx off = 0.5 * (m_[1] + std::conj(m_[2]));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(off));
  return mean - half_gap;
}

bool DensityMatrix::is_valid(double tol) const {
  try {
    check_valid(tol);
  } catch (const std::invalid_argument&) {
    return false;
  }
  return true;
}

void DensityMatrix::check_valid(double tol) const {
  for (const auto& v : m_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("density matrix has non-finite elements");
    }
  }
  if (std::abs(m_[2] - std::conj(m_[1])) > tol || std::abs(m_[0].imag()) > tol ||
      std::abs(m_[3].imag()) > tol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(trace() - 1.0) > tol) {
    throw std::invalid_argument("density matrix trace is " + std::to_string(trace().real()));
  }
  if (min_eigenvalue() < -tol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
  const double p = purity();
  if (p < 0.5 - tol || p > 1.0 + tol) {
    throw std::invalid_argument("density matrix purity out of range");
  }
}

void ElectronParams::validate() const {
  if (g_factor == 0.0 || !std::isfinite(g_factor)) {
    throw std::invalid_argument("g_factor must be finite and non-zero");
  }
  if (!(t2 > 0.0)) {
    throw std::invalid_argument("t2 must be positive");
  }
}

BlochVector bloch_vector(const DensityMatrix& rho) {
  return {2.0 * rho(0, 1).real(), 2.0 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

DensityMatrix apply_phase_damping(const DensityMatrix& rho, double dt, double t2) {
  if (!(t2 > 0.0)) {
    throw std::invalid_argument("phase damping requires t2 > 0");
  }
  if (dt < 0.0) {
    throw std::invalid_argument("phase damping requires dt >= 0");
  }
  const double decay = std::exp(-dt / t2);
  DensityMatrix out = rho;
  out(0, 1) *= decay;
  out(1, 0) *= decay;
  return out;
}

double larmor_per_tesla(double g_factor) {
  return std::abs(g_factor) * constants::mu_B / constants::h;
}

double field_to_larmor(double field, double g_factor) {
  if (field < 0.0) {
    throw std::invalid_argument("field must be non-negative");
  }
  return larmor_per_tesla(g_factor) * field;
}

double larmor_to_field(double frequency, double g_factor) {
  if (g_factor == 0.0) {
    throw std::invalid_argument("g_factor must be non-zero");
  }
  return frequency / larmor_per_tesla(g_factor);
}

}  // namespace edsr
