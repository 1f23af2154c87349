#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bvd/error.hpp"
#include "bvd/solver/state.hpp"
#include "bvd/spectral/fft.hpp"
#include "bvd/spectral/ops.hpp"

namespace bvd::solver {

using spectral::Axis;
using spectral::Complex;
using spectral::SpectralField;

struct StepperConfig {
  double dt = 1e-3;
  double cfl_limit = 0.5;
  bool dealias = true;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("stepper: dt must be positive");
    if (!(cfl_limit > 0.0) || !std::isfinite(cfl_limit)) {
      throw InvalidArgument("stepper: cfl_limit must be positive");
    }
  }
};

/// Spectral tendencies of (u, v, theta).
struct Tendency {
  SpectralField du;
  SpectralField dv;
  SpectralField dtheta;
};

namespace detail {

inline SpectralField product(const Field& a, const Field& b, bool dealias) {
  SpectralField P = spectral::to_spectral(a * b);
  return dealias ? spectral::dealias(std::move(P)) : P;
}

/// -(d_x A + d_y B) with Nyquist lines zeroed.
inline SpectralField neg_div(const SpectralField& A, const SpectralField& B) {
  SpectralField out = spectral::derivative(A, Axis::x, 1);
  out += spectral::derivative(B, Axis::y, 1);
  out *= Complex(-1.0, 0.0);
  return out;
}

/// Tendency of the spectral triple (U, V, T): advection in divergence form,
/// buoyancy, then projection onto divergence-free fields.
inline Tendency nonlinear(const SpectralField& U, const SpectralField& V, const SpectralField& T,
                          bool dealias) {
  const Field u = spectral::to_physical(U);
  const Field v = spectral::to_physical(V);
  const Field th = spectral::to_physical(T);
  const SpectralField uv = product(u, v, dealias);
  SpectralField du = neg_div(product(u, u, dealias), uv);
  SpectralField dv = neg_div(uv, product(v, v, dealias));
  SpectralField dth = neg_div(product(u, th, dealias), product(v, th, dealias));
  dv += T;
  auto [pu, pv] = spectral::leray_project(std::move(du), std::move(dv));
  return {std::move(pu), std::move(pv), std::move(dth)};
}

}  // namespace detail

/// Right-hand side of the pressure equation,
/// -2 (v u_y)_x - 2 (v v_y)_y + theta_y, with products optionally dealiased.
inline SpectralField pressure_rhs(const State& s, bool dealias = true) {
  const Field uy = spectral::derivative(s.u, Axis::y);
  const Field vy = spectral::derivative(s.v, Axis::y);
  SpectralField rhs = detail::neg_div(detail::product(s.v, uy, dealias),
                                      detail::product(s.v, vy, dealias));
  rhs *= Complex(2.0, 0.0);
  rhs += spectral::derivative(spectral::to_spectral(s.theta), Axis::y, 1);
  return rhs;
}

/// Mean-zero pressure of a divergence-free state.
inline Field pressure(const State& s, bool dealias = true) {
  return spectral::to_physical(spectral::poisson_solve(pressure_rhs(s, dealias)));
}

/// Tendencies excluding vertical diffusion, as physical fields.
struct PhysicalTendency {
  Field du;
  Field dv;
  Field dtheta;
};

inline PhysicalTendency rhs(const State& s, bool dealias = true) {
  s.validate();
  const Tendency k = detail::nonlinear(spectral::to_spectral(s.u), spectral::to_spectral(s.v),
                                       spectral::to_spectral(s.theta), dealias);
  return {spectral::to_physical(k.du), spectral::to_physical(k.dv),
          spectral::to_physical(k.dtheta)};
}

/// Advective CFL number dt * max(|u|/dx, |v|/dy) on grid samples.
inline double cfl_number(const State& s, double dt) {
  const Grid& g = s.grid();
  return dt * std::max(s.u.grid_max_abs() / g.dx(), s.v.grid_max_abs() / g.dy());
}

/// max |u_x + v_y| evaluated spectrally.
inline double divergence_residual(const State& s) {
  return spectral::to_physical(
             spectral::divergence(spectral::to_spectral(s.u), spectral::to_spectral(s.v)))
      .grid_max_abs();
}

/// Integrating-factor RK4 (Lawson) stepper.
///
/// The linear part -nu k_y^2 (velocity) and -kappa k_y^2 (theta) is applied
/// exactly through exponential factors; advection and buoyancy go through
/// classical RK4 in the transformed variable. Factors for a given step size
/// are cached, so reuse one Stepper across a run.
class Stepper {
 public:
  Stepper(const Grid& grid, PhysParams params, StepperConfig config)
      : grid_(grid), params_(params), config_(config) {
    params_.validate();
    config_.validate();
  }

  const StepperConfig& config() const { return config_; }

  /// Advance by the configured dt.
  State advance(const State& s) const { return advance(s, config_.dt); }

  /// Advance by h (0 < h <= dt is typical for a final partial step).
  State advance(const State& s, double h) const {
    s.validate();
    spectral::require_same_grid(grid_, s.grid(), "stepper");
    if (!(h > 0.0)) throw InvalidArgument("stepper: step size must be positive");
    const double cfl = cfl_number(s, h);
    if (!(cfl <= config_.cfl_limit)) {
      throw StepError(StepError::Kind::cfl_violation, s.t,
                      "cfl=" + format_double(cfl) + " limit=" + format_double(config_.cfl_limit));
    }
    prepare(h);
    const bool da = config_.dealias;

    const SpectralField U = spectral::to_spectral(s.u);
    const SpectralField V = spectral::to_spectral(s.v);
    const SpectralField T = spectral::to_spectral(s.theta);

    const Tendency k1 = detail::nonlinear(U, V, T, da);
    // Stage 2: E(h/2) (X + h/2 k1).
    SpectralField U2 = axpy(U, 0.5 * h, k1.du), V2 = axpy(V, 0.5 * h, k1.dv),
                  T2 = axpy(T, 0.5 * h, k1.dtheta);
    scale(U2, half_vel_), scale(V2, half_vel_), scale(T2, half_th_);
    const Tendency k2 = detail::nonlinear(U2, V2, T2, da);
    // Stage 3: E(h/2) X + h/2 k2.
    SpectralField EU = U, EV = V, ET = T;
    scale(EU, half_vel_), scale(EV, half_vel_), scale(ET, half_th_);
    const Tendency k3 = detail::nonlinear(axpy(EU, 0.5 * h, k2.du), axpy(EV, 0.5 * h, k2.dv),
                                          axpy(ET, 0.5 * h, k2.dtheta), da);
    // Stage 4: E(h) X + h E(h/2) k3.
    SpectralField FU = U, FV = V, FT = T;
    scale(FU, full_vel_), scale(FV, full_vel_), scale(FT, full_th_);
    SpectralField k3u = k3.du, k3v = k3.dv, k3t = k3.dtheta;
    scale(k3u, half_vel_), scale(k3v, half_vel_), scale(k3t, half_th_);
    const Tendency k4 =
        detail::nonlinear(axpy(FU, h, k3u), axpy(FV, h, k3v), axpy(FT, h, k3t), da);

    // X+ = E(h) X + h/6 [E(h) k1 + 2 E(h/2)(k2 + k3) + k4].
    auto combine = [&](SpectralField X, const SpectralField& a1, const SpectralField& a2,
                       const SpectralField& a3, const SpectralField& a4,
                       const std::vector<double>& full, const std::vector<double>& half) {
      auto x = X.coeffs();
      const auto c1 = a1.coeffs(), c2 = a2.coeffs(), c3 = a3.coeffs(), c4 = a4.coeffs();
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = full[i] * (x[i] + (h / 6.0) * c1[i]) +
               (h / 6.0) * (2.0 * half[i] * (c2[i] + c3[i]) + c4[i]);
      }
      return X;
    };
    SpectralField Un = combine(U, k1.du, k2.du, k3.du, k4.du, full_vel_, half_vel_);
    SpectralField Vn = combine(V, k1.dv, k2.dv, k3.dv, k4.dv, full_vel_, half_vel_);
    SpectralField Tn = combine(T, k1.dtheta, k2.dtheta, k3.dtheta, k4.dtheta, full_th_, half_th_);
    auto [Up, Vp] = spectral::leray_project(std::move(Un), std::move(Vn));

    State out{spectral::to_physical(Up), spectral::to_physical(Vp), spectral::to_physical(Tn),
              s.t + h, s.params};
    if (!out.u.all_finite() || !out.v.all_finite() || !out.theta.all_finite()) {
      throw StepError(StepError::Kind::blow_up_suspected, out.t, "non-finite field values");
    }
    return out;
  }

 private:
  static std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  static SpectralField axpy(SpectralField X, double a, const SpectralField& Y) {
    auto x = X.coeffs();
    const auto y = Y.coeffs();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
    return X;
  }

  static void scale(SpectralField& X, const std::vector<double>& m) {
    auto x = X.coeffs();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= m[i];
  }

  void prepare(double h) const {
    if (h == cached_h_) return;
    const std::size_t n = grid_.spectral_size();
    half_vel_.assign(n, 1.0), full_vel_.assign(n, 1.0);
    half_th_.assign(n, 1.0), full_th_.assign(n, 1.0);
    for (std::size_t ix = 0; ix < grid_.nx(); ++ix) {
      for (std::size_t iy = 0; iy < grid_.nyh(); ++iy) {
        const double k2 = grid_.ky(iy) * grid_.ky(iy);
        const std::size_t i = grid_.spectral_index(ix, iy);
        half_vel_[i] = std::exp(-params_.nu * k2 * 0.5 * h);
        full_vel_[i] = std::exp(-params_.nu * k2 * h);
        half_th_[i] = std::exp(-params_.kappa * k2 * 0.5 * h);
        full_th_[i] = std::exp(-params_.kappa * k2 * h);
      }
    }
    cached_h_ = h;
  }

  Grid grid_;
  PhysParams params_;
  StepperConfig config_;
  mutable double cached_h_ = -1.0;
  mutable std::vector<double> half_vel_, full_vel_, half_th_, full_th_;
};

/// One step of size config.dt.
inline State step(const State& s, const StepperConfig& config) {
  return Stepper(s.grid(), s.params, config).advance(s);
}

}  // namespace bvd::solver
