#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "bvd/spectral/field.hpp"

namespace bvd::spectral {

namespace detail {

// FFTW plans for one (nx, ny). Planned with FFTW_ESTIMATE | FFTW_UNALIGNED so
// the same plan can be executed on caller-owned buffers from any thread, and
// so that results do not depend on timing measurements.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  PlanPair(std::size_t nx, std::size_t ny) {
    const int n0 = static_cast<int>(nx);
    const int n1 = static_cast<int>(ny);
    std::vector<double> real(nx * ny);
    std::vector<Complex> cplx(nx * (ny / 2 + 1));
    auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c = fftw_plan_dft_r2c_2d(n0, n1, real.data(), c, flags);
    c2r = fftw_plan_dft_c2r_2d(n0, n1, c, real.data(), flags);
  }
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }
};

// The FFTW planner is not thread-safe; plan creation is serialized here.
// Executing an existing plan on new arrays is safe concurrently.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  const PlanPair& get(std::size_t nx, std::size_t ny) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(nx, ny);
    auto it = plans_.find(key);
    if (it == plans_.end()) {
      it = plans_.emplace(key, std::make_unique<PlanPair>(nx, ny)).first;
    }
    return *it->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<PlanPair>> plans_;
};

}  // namespace detail

inline SpectralField to_spectral(const Field& f) {
  const Grid& g = f.grid();
  if (f.data().size() != g.size()) throw SizeMismatch("to_spectral: field size does not match grid");
  const auto& plan = detail::PlanCache::instance().get(g.nx(), g.ny());
  SpectralField out(g);
  // r2c leaves its input intact, but the API takes a non-const pointer.
  std::vector<double> in(f.data());
  fftw_execute_dft_r2c(plan.r2c, in.data(),
                       reinterpret_cast<fftw_complex*>(out.coeffs().data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out.coeffs()) c *= scale;
  return out;
}

inline Field to_physical(const SpectralField& F) {
  const Grid& g = F.grid();
  if (F.coeffs().size() != g.spectral_size()) {
    throw SizeMismatch("to_physical: coefficient count does not match grid");
  }
  const auto& plan = detail::PlanCache::instance().get(g.nx(), g.ny());
  // c2r overwrites its input.
  std::vector<Complex> in(F.coeffs().begin(), F.coeffs().end());
  std::vector<double> out(g.size());
  fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return Field(g, std::move(out));
}

/// Spectral (trigonometric) interpolation of F onto a grid `factor` times finer.
///
/// Nyquist coefficients are split evenly between the +N/2 and -N/2 modes of
/// the finer grid, so the interpolant is real and agrees with the original
/// samples at the coarse grid points.
inline SpectralField pad_spectrum(const SpectralField& F, std::size_t factor) {
  if (factor < 1) throw InvalidArgument("pad_spectrum: factor must be >= 1");
  const Grid& g = F.grid();
  const Grid fine = g.refined(factor);
  SpectralField out(fine);
  if (factor == 1) {
    std::copy(F.coeffs().begin(), F.coeffs().end(), out.coeffs().begin());
    return out;
  }
  const long half_x = static_cast<long>(g.nx() / 2);
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    const long kx = g.wave_index_x(ix);
    for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
      Complex c = F(ix, iy);
      if (c == Complex(0.0, 0.0)) continue;
      if (g.nyquist_y(iy)) c *= 0.5;
      auto row = [&](long k) {
        return static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long>(fine.nx()));
      };
      if (kx == -half_x || kx == half_x) {
        out(row(half_x), iy) += 0.5 * c;
        out(row(-half_x), iy) += 0.5 * c;
      } else {
        out(row(kx), iy) += c;
      }
    }
  }
  return out;
}

}  // namespace bvd::spectral
