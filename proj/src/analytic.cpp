#include "edsr/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "edsr/spin_core.hpp"

namespace edsr {

namespace {
constexpr double kPi = std::numbers::pi;
}

double landau_zener_exponent(double rabi, double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("chirp rate must be positive");
  }
  if (rabi < 0.0) {
    throw std::invalid_argument("rabi frequency must be non-negative");
  }
  const double omega = 2.0 * kPi * rabi;
  const double alpha = 2.0 * kPi * rate;
  return kPi * omega * omega / (2.0 * alpha);
}

double landau_zener_flip_probability(double rabi, double rate) {
  return -std::expm1(-landau_zener_exponent(rabi, rate));
}

double adiabaticity_ratio(double rabi, double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("chirp rate must be positive");
  }
  const double omega = 2.0 * kPi * rabi;
  const double domega_dt = 2.0 * kPi * rate;
  return omega * omega / ((2.0 / kPi) * domega_dt);
}

double effective_field(double detuning, double b1, double g_factor) {
  const double bz = detuning / larmor_per_tesla(g_factor);
  return std::hypot(b1, bz);
}

double rabi_to_drive_field(double rabi, double g_factor) {
  return rabi / larmor_per_tesla(g_factor);
}

RabiFit extract_rabi_from_duration_sweep(const std::vector<DurationSweepPoint>& points,
                                         double fm_depth, double p_max,
                                         const RabiFitOptions& options) {
  if (points.size() < 4) {
    throw std::invalid_argument("rabi extraction needs at least 4 points");
  }
  if (!(fm_depth > 0.0)) {
    throw std::invalid_argument("rabi extraction needs fm_depth > 0");
  }
  if (!(p_max > 0.0) || p_max > 1.0) {
    throw std::invalid_argument("p_max must lie in (0, 1]");
  }
  std::vector<DurationSweepPoint> data = points;
  std::sort(data.begin(), data.end(), [](const auto& a, const auto& b) {
    return a.burst_duration < b.burst_duration;
  });
  if (data.front().burst_duration == data.back().burst_duration) {
    throw std::invalid_argument("all burst durations are equal");
  }
  for (const auto& p : data) {
    if (!(p.burst_duration > 0.0)) throw std::invalid_argument("burst durations must be positive");
  }

  // Start from the first crossing of p_max (1 - 1/e).
  const double target = p_max * (1.0 - std::exp(-1.0));
  double tau0 = 0.0;
  if (data.front().p_down >= target) {
    throw std::runtime_error("no decay to fit: data never falls below p_max (1 - 1/e)");
  }
  for (std::size_t i = 1; i < data.size(); ++i) {
    if (data[i].p_down >= target) {
      const auto& a = data[i - 1];
      const auto& b = data[i];
      const double frac = (target - a.p_down) / (b.p_down - a.p_down);
      tau0 = a.burst_duration + frac * (b.burst_duration - a.burst_duration);
      break;
    }
  }
  if (tau0 == 0.0) tau0 = 2.0 * data.back().burst_duration;

  // Levenberg-Marquardt in (log tau0, p_max).
  double log_tau = std::log(tau0);
  double amp = p_max;
  const int n_par = options.fit_p_max ? 2 : 1;
  auto cost = [&](double lt, double a) {
    double s = 0.0;
    for (const auto& p : data) {
      const double r = a * (1.0 - std::exp(-p.burst_duration / std::exp(lt))) - p.p_down;
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double current = cost(log_tau, amp);
  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    double jtj[2][2] = {{0, 0}, {0, 0}};
    double jtr[2] = {0, 0};
    const double tau = std::exp(log_tau);
    for (const auto& p : data) {
      const double e = std::exp(-p.burst_duration / tau);
      const double r = amp * (1.0 - e) - p.p_down;
      const double j[2] = {-amp * e * p.burst_duration / tau, 1.0 - e};
      for (int a = 0; a < n_par; ++a) {
        jtr[a] += j[a] * r;
        for (int b = 0; b < n_par; ++b) jtj[a][b] += j[a] * j[b];
      }
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      double m[2][2] = {{jtj[0][0] * (1.0 + lambda), jtj[0][1]},
                        {jtj[1][0], jtj[1][1] * (1.0 + lambda)}};
      double d[2] = {0.0, 0.0};
      if (n_par == 1) {
        if (m[0][0] <= 0.0) break;
        d[0] = -jtr[0] / m[0][0];
      } else {
        const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det <= 0.0) break;
        d[0] = -(m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det;
        d[1] = -(m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det;
      }
      const double trial = cost(log_tau + d[0], amp + d[1]);
      if (trial <= current) {
        const double change = std::abs(d[0]) + std::abs(d[1]);
        log_tau += d[0];
        amp += d[1];
        converged = change < 1e-12 || current - trial <= 1e-15 * std::max(current, 1e-300);
        current = trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped || converged) {
      converged = true;
      break;
    }
  }

  const double tau = std::exp(log_tau);
  const double lo = data.front().burst_duration * 1e-3;
  const double hi = data.back().burst_duration * 1e3;
  if (!converged || !std::isfinite(tau) || tau < lo || tau > hi || !(amp > 0.0)) {
    throw std::runtime_error("exponential fit did not converge");
  }

  RabiFit fit;
  fit.tau0 = tau;
  fit.p_max = amp;
  fit.rabi = std::sqrt(fm_depth / (kPi * kPi * tau));
  fit.rms_residual = std::sqrt(current / static_cast<double>(data.size()));
  fit.iterations = it;
  return fit;
}

double double_passage_probability(double p_single) {
  if (!(p_single >= 0.0 && p_single <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1]");
  }
  return 2.0 * p_single * (1.0 - p_single);
}

}  // namespace edsr
