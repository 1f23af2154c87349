#pragma once

#include <cmath>
#include <string>

#include "bvd/spectral/field.hpp"

namespace bvd::solver {

using spectral::Field;
using spectral::Grid;

/// Viscosity nu and thermal diffusivity kappa, both acting through d_yy only.
struct PhysParams {
  double nu = 0.0;
  double kappa = 0.0;

  void validate() const {
    if (!std::isfinite(nu) || !std::isfinite(kappa) || nu < 0.0 || kappa < 0.0) {
      throw InvalidArgument("physical parameters must be finite and non-negative");
    }
  }
  bool operator==(const PhysParams&) const = default;
};

/// Velocity (u, v), temperature theta and time.
struct State {
  Field u;
  Field v;
  Field theta;
  double t = 0.0;
  PhysParams params;

  const Grid& grid() const { return u.grid(); }

  static State zero(const Grid& g, PhysParams params, double t = 0.0) {
    return {Field(g), Field(g), Field(g), t, params};
  }

  void validate() const {
    spectral::require_same_grid(u.grid(), v.grid(), "state");
    spectral::require_same_grid(u.grid(), theta.grid(), "state");
    params.validate();
    if (!std::isfinite(t)) throw InvalidArgument("state time is not finite");
  }

  bool operator==(const State&) const = default;
};

}  // namespace bvd::solver
