#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "edsr/analytic.hpp"
#include "edsr/integrator.hpp"

using namespace edsr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kG = -0.339;

DriveProgram single_tone(double f, double fm, double duration, double rabi,
                         ChirpShape shape = ChirpShape::Up) {
  DriveProgram p;
  p.schedule = {f, fm, duration, shape};
  p.rabi_so = rabi;
  return p;
}

double p_down(const DriveProgram& p, double field, double t2, const PropagationConfig& cfg = {}) {
  return propagate(DensityMatrix::spin_up(), p, field, ElectronParams{kG, t2}, cfg)
      .final_state.p_down();
}

// Distance of a 2x2 matrix product U U^dagger from the identity.
double unitarity_error(const Matrix2& u) {
  double err = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      cplx s = 0.0;
      for (int k = 0; k < 2; ++k) s += u[2 * r + k] * std::conj(u[2 * c + k]);
      err = std::max(err, std::abs(s - (r == c ? 1.0 : 0.0)));
    }
  }
  return err;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("step unitary") {
  const auto id = step_unitary(0, 0, 0, 1e-9);
  CHECK(std::abs(id[0] - 1.0) < 1e-15);
  CHECK(std::abs(id[1]) < 1e-15);

  // Half-turn about z flips an equatorial Bloch vector.
  const double f = 10e6;
  const auto u = step_unitary(0, 0, f, 1.0 / (2 * f));
  const auto rho = apply_unitary(u, DensityMatrix::from_bloch({1, 0, 0}));
  CHECK(bloch_vector(rho).x == doctest::Approx(-1.0));
  CHECK(std::abs(bloch_vector(rho).y) < 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1e8, 1e8);
  for (int i = 0; i < 200; ++i) {
    CHECK(unitarity_error(step_unitary(d(rng), d(rng), d(rng), 1e-7)) < 1e-13);
  }
}

TEST_CASE("no drive leaves populations unchanged") {
  const double b = larmor_to_field(26.5e9, kG);
  for (auto shape : {ChirpShape::Up, ChirpShape::Triangle}) {
    CHECK(p_down(single_tone(26.5e9, 40e6, 20e-6, 0.0, shape), b, 100e-6) == doctest::Approx(0.0));
  }
}

TEST_CASE("resonant pi pulse") {
  const double rabi = 1e6;
  const double b = larmor_to_field(26.5e9, kG);
  CHECK(std::abs(p_down(single_tone(26.5e9, 0.0, 0.5 / rabi, rabi), b, kInf) - 1.0) < 1e-6);
  // Two pi pulses return the spin.
  CHECK(p_down(single_tone(26.5e9, 0.0, 1.0 / rabi, rabi), b, kInf) < 1e-6);
}

TEST_CASE("single passage follows Landau-Zener") {
  const double rabi = 0.2e6;
  const double b = larmor_to_field(26.5e9, kG);
  const auto p = single_tone(26.5e9, 75e6, 400e-6, rabi);
  const double expected = landau_zener_flip_probability(rabi, p.schedule.rate());
  CHECK(expected == doctest::Approx(0.88).epsilon(0.01));
  CHECK(std::abs(p_down(p, b, kInf) - expected) < 0.01);
}

TEST_CASE("lab frame free precession at the Larmor frequency") {
  const double fl = 200e6;
  const double b = larmor_to_field(fl, kG);
  PropagationConfig cfg;
  cfg.frame = Frame::Lab;
  const auto p = single_tone(fl, 0.0, 1.0 / (4 * fl), 0.0);
  const auto r = propagate_lab(DensityMatrix::from_bloch({1, 0, 0}), p, b, ElectronParams{kG, kInf}, cfg);
  const auto v = bloch_vector(r.final_state);
  // A quarter period moves the vector a quarter turn around z.
  CHECK(std::abs(v.x) < 1e-9);
  CHECK(std::abs(std::abs(v.y) - 1.0) < 1e-9);
  CHECK(v.z == doctest::Approx(0.0));
}

TEST_CASE("rotating and lab frames agree at scaled parameters") {
  const double fl = 200e6;
  const double b = larmor_to_field(fl, kG);
  const auto p = single_tone(fl, 10e6, 50e-6, 1e6);
  PropagationConfig lab{0.0, 160.0, Frame::Lab};
  const double rot = p_down(p, b, kInf);
  const double lab_p = p_down(p, b, kInf, lab);
  CHECK(std::abs(rot - lab_p) < 1e-3);
}

TEST_CASE("counter-rotating resonance shift vanishes as rabi / f_L -> 0") {
  // Pi pulse detuned by +-rabi/2: in the rotating-wave picture the response
  // is symmetric; the lab-frame asymmetry measures the Bloch-Siegert shift.
  const double fl = 200e6;
  const double b = larmor_to_field(fl, kG);
  PropagationConfig lab{0.0, 80.0, Frame::Lab};
  double previous = kInf;
  double first = 0.0;
  for (double ratio : {0.05, 0.02, 0.01, 0.005}) {
    const double rabi = ratio * fl;
    const double dur = 0.5 / rabi;
    const double hi = p_down(single_tone(fl + 0.5 * rabi, 0.0, dur, rabi), b, kInf, lab);
    const double lo = p_down(single_tone(fl - 0.5 * rabi, 0.0, dur, rabi), b, kInf, lab);
    const double asym = std::abs(hi - lo);
    if (first == 0.0) first = asym;
    CHECK(asym < previous);
    previous = asym;

    const double hi_rot = p_down(single_tone(fl + 0.5 * rabi, 0.0, dur, rabi), b, kInf);
    const double lo_rot = p_down(single_tone(fl - 0.5 * rabi, 0.0, dur, rabi), b, kInf);
    CHECK(std::abs(hi_rot - lo_rot) < 1e-9);
  }
  CHECK(first > 1e-3);
  CHECK(previous < 0.2 * first);
}

TEST_CASE("trajectory, purity and state invariants") {
  const double b = larmor_to_field(26.5e9, kG);
  auto p = single_tone(26.5e9, 40e6, 100e-6, 1e6);
  p.species = species::gaas(0.5e6);
  PropagationConfig cfg;
  cfg.record_trajectory = true;
  cfg.trajectory_stride = 1000;
  const auto r = propagate(DensityMatrix::spin_up(), p, b, ElectronParams{kG, kInf}, cfg);
  CHECK(r.trajectory.size() >= r.steps / 1000);
  CHECK(r.trajectory.front().t == 0.0);
  CHECK(std::abs(r.final_state.purity() - 1.0) < 1e-10);
  CHECK(r.final_state.is_valid());
  for (const auto& s : r.trajectory) {
    CHECK(s.x * s.x + s.y * s.y + s.z * s.z == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto damped = propagate(DensityMatrix::spin_up(), p, b, ElectronParams{kG, 20e-6}, cfg);
  CHECK(damped.final_state.purity() < 1.0);
  CHECK(damped.final_state.is_valid());
}

TEST_CASE("step halving converges") {
  const auto res = resonance_fields(26.5e9, kG, species::gaas(1.0));
  auto p = single_tone(26.5e9, 40e6, 500e-6, 1.25e6 / (2 * std::numbers::pi));
  p.species = species::gaas(0.63e6 / (2 * std::numbers::pi));
  for (double b : {res.b_so, res.b_species.at("As75"), res.b_species.at("Ga71") + 2e-3}) {
    PropagationConfig cfg;
    const double p1 = p_down(p, b, 100e-6, cfg);
    cfg.dt = 0.5 * default_step(p, b, kG, Frame::Rotating);
    const double p2 = p_down(p, b, 100e-6, cfg);
    CHECK(std::abs(p1 - p2) < 1e-4);
  }
}

TEST_CASE("adiabatic triangle chirp undoes itself") {
  const double b = larmor_to_field(26.5e9, kG);
  CHECK(p_down(single_tone(26.5e9, 40e6, 100e-6, 1e6, ChirpShape::Triangle), b, kInf) < 0.05);
}

TEST_CASE("step size invariant and frame checks") {
  const double b = larmor_to_field(26.5e9, kG);
  const auto p = single_tone(26.5e9, 40e6, 10e-6, 1e6);
  const double bw = frame_bandwidth(p, b, kG, Frame::Rotating);
  CHECK(bw == doctest::Approx(20e6));
  CHECK(max_step(p, b, kG, Frame::Rotating) == doctest::Approx(1.0 / (20 * bw)));
  CHECK(default_step(p, b, kG, Frame::Rotating) == doctest::Approx(1.0 / (40 * bw)));
  CHECK(frame_bandwidth(p, b, kG, Frame::Lab) == doctest::Approx(26.52e9));
  CHECK(std::isinf(max_step(single_tone(26.5e9, 0.0, 1e-6, 1e6), b, kG, Frame::Rotating)));

  PropagationConfig too_coarse;
  too_coarse.dt = 2.0 / (20 * bw);
  CHECK_THROWS(p_down(p, b, kInf, too_coarse));
  PropagationConfig too_few;
  too_few.steps_per_period = 10;
  CHECK_THROWS(p_down(p, b, kInf, too_few));
  PropagationConfig lab;
  lab.frame = Frame::Lab;
  CHECK_THROWS(propagate_rotating(DensityMatrix::spin_up(), p, b, ElectronParams{kG, kInf}, lab));
  CHECK_THROWS(propagate(DensityMatrix(1.0, 0.0, 0.0, 1.0), p, b, ElectronParams{kG, kInf}, {}));
  CHECK(frame_from_string("lab") == Frame::Lab);
  CHECK_THROWS(frame_from_string("interaction"));
}

}
