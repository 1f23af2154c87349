#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "bvd/error.hpp"

namespace bvd::spectral {

enum class Axis { x, y };

/// Uniform periodic grid on [0, lx) x [0, ly).
///
/// Physical samples are stored row-major with x as the slow index:
/// value(ix, iy) lives at ix * ny + iy. Spectral coefficients use the
/// real-to-complex half layout, nx rows by (ny/2 + 1) columns.
class Grid {
 public:
  Grid(std::size_t nx, std::size_t ny, double lx = 2.0 * std::numbers::pi,
       double ly = 2.0 * std::numbers::pi)
      : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
      throw InvalidArgument("grid sizes must be even and >= 8, got " + std::to_string(nx) +
                            "x" + std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
      throw InvalidArgument("box lengths must be positive and finite");
    }
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }

  std::size_t size() const { return nx_ * ny_; }
  std::size_t nyh() const { return ny_ / 2 + 1; }
  std::size_t spectral_size() const { return nx_ * nyh(); }

  double dx() const { return lx_ / static_cast<double>(nx_); }
  double dy() const { return ly_ / static_cast<double>(ny_); }
  double cell_area() const { return dx() * dy(); }
  double area() const { return lx_ * ly_; }

  double x(std::size_t ix) const { return static_cast<double>(ix) * dx(); }
  double y(std::size_t iy) const { return static_cast<double>(iy) * dy(); }

  std::size_t index(std::size_t ix, std::size_t iy) const { return ix * ny_ + iy; }
  std::size_t spectral_index(std::size_t ix, std::size_t iy) const { return ix * nyh() + iy; }

  /// Signed integer wave index along x for spectral row ix.
  long wave_index_x(std::size_t ix) const {
    return ix <= nx_ / 2 ? static_cast<long>(ix) : static_cast<long>(ix) - static_cast<long>(nx_);
  }
  long wave_index_y(std::size_t iy) const { return static_cast<long>(iy); }

  double kx(std::size_t ix) const { return 2.0 * std::numbers::pi / lx_ * wave_index_x(ix); }
  double ky(std::size_t iy) const { return 2.0 * std::numbers::pi / ly_ * wave_index_y(iy); }
  double kmag(std::size_t ix, std::size_t iy) const { return std::hypot(kx(ix), ky(iy)); }

  bool nyquist_x(std::size_t ix) const { return ix == nx_ / 2; }
  bool nyquist_y(std::size_t iy) const { return iy == ny_ / 2; }
  bool nyquist(std::size_t ix, std::size_t iy) const { return nyquist_x(ix) || nyquist_y(iy); }

  /// Largest |k| representable on the grid (the Nyquist corner).
  double kmax() const {
    return std::hypot(std::numbers::pi * nx_ / lx_, std::numbers::pi * ny_ / ly_);
  }
  /// Smallest nonzero |k|.
  double kmin() const {
    return std::min(2.0 * std::numbers::pi / lx_, 2.0 * std::numbers::pi / ly_);
  }

  /// Same box, resolution multiplied by factor.
  Grid refined(std::size_t factor) const { return Grid(nx_ * factor, ny_ * factor, lx_, ly_); }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  double lx_;
  double ly_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw SizeMismatch(std::string(what) + ": grids differ");
}

}  // namespace bvd::spectral
