#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include "bvd/solver/state.hpp"
#include "bvd/spectral/random.hpp"

namespace bvd::solver {

/// Parameters of the random initial-data presets.
struct RandomInit {
  double slope = -1.0;     // velocity and theta amplitude spectra ~ |k|^slope
  double amplitude = 0.5;  // rms speed of (u, v)
  double theta_amplitude = 0.1;  // rms of the random part of theta
  double k_hi = 8.0;       // band limit of the random parts
  std::uint64_t seed = 1;
};

/// Horizontal shear u = a cos(k y), v = theta = 0, k = 2 pi / ly (an exact solution).
inline State shear(const Grid& g, PhysParams params, double amplitude = 1.0) {
  const double k = 2.0 * std::numbers::pi / g.ly();
  State s = State::zero(g, params);
  s.u = Field::sample(g, [&](double, double y) { return amplitude * std::cos(k * y); });
  return s;
}

/// Closed-form shear solution a cos(k y) e^{-nu k^2 t}, k = 2 pi / ly.
inline State shear_exact(const Grid& g, PhysParams params, double t, double amplitude = 1.0) {
  const double k = 2.0 * std::numbers::pi / g.ly();
  State s = shear(g, params, amplitude * std::exp(-params.nu * k * k * t));
  s.t = t;
  return s;
}

/// Fluid at rest with uniform temperature c.
inline State buoyant_rest(const Grid& g, PhysParams params, double c) {
  State s = State::zero(g, params);
  s.theta = Field::constant(g, c);
  return s;
}

namespace detail {

/// Divergence-free random velocity from a random streamfunction, scaled to
/// the given rms speed.
inline std::pair<Field, Field> random_velocity(const Grid& g, const RandomInit& init) {
  auto rng = spectral::make_rng(init.seed, {1});
  spectral::SpectrumShape shape;
  shape.k_lo = 1e-12;
  shape.k_hi = init.k_hi;
  shape.slope = init.slope - 1.0;
  const auto psi = spectral::random_spectrum(g, rng, shape);
  Field u = spectral::to_physical(spectral::derivative(psi, spectral::Axis::y, 1));
  u *= -1.0;
  Field v = spectral::to_physical(spectral::derivative(psi, spectral::Axis::x, 1));
  double ss = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    ss += u.data()[i] * u.data()[i] + v.data()[i] * v.data()[i];
  }
  const double rms = std::sqrt(ss / static_cast<double>(g.size()));
  if (rms > 0.0) {
    u *= init.amplitude / rms;
    v *= init.amplitude / rms;
  }
  return {std::move(u), std::move(v)};
}

/// Mean-zero random scalar with the given rms.
inline Field random_scalar(const Grid& g, const RandomInit& init, double rms) {
  auto rng = spectral::make_rng(init.seed, {2});
  spectral::SpectrumShape shape;
  shape.k_lo = 1e-12;
  shape.k_hi = init.k_hi;
  shape.slope = init.slope;
  Field f = spectral::random_field(g, rng, shape);
  // Unit L2 norm over the box; rescale to the requested rms.
  f *= rms * std::sqrt(g.area());
  return f;
}

}  // namespace detail

/// Band-limited random velocity and temperature.
inline State random_state(const Grid& g, PhysParams params, const RandomInit& init) {
  State s = State::zero(g, params);
  std::tie(s.u, s.v) = detail::random_velocity(g, init);
  s.theta = detail::random_scalar(g, init, init.theta_amplitude);
  return s;
}

/// Layered temperature profile stratification * cos y plus small random
/// perturbations of velocity and temperature.
inline State stratified(const Grid& g, PhysParams params, const RandomInit& init,
                        double stratification = 1.0) {
  State s = random_state(g, params, init);
  const double k = 2.0 * std::numbers::pi / g.ly();
  s.theta += Field::sample(g, [&](double, double y) { return stratification * std::cos(k * y); });
  return s;
}

}  // namespace bvd::solver
