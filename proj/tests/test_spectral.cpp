#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <thread>

#include "bvd/diag/norms.hpp"
#include "bvd/spectral/random.hpp"

using namespace bvd::spectral;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

double rel_max_err(const Field& a, const Field& b) {
  return max_abs_diff(a, b) / std::max(b.grid_max_abs(), 1e-300);
}

// Smooth, not band-limited test potential.
double smooth_phi(double x, double y) { return std::exp(std::sin(x)) * std::cos(2.0 * y) + std::sin(x + y); }

}  // namespace

TEST_CASE("grid validates sizes", "[grid]") {
  CHECK_THROWS_AS(Grid(6, 8), bvd::InvalidArgument);
  CHECK_THROWS_AS(Grid(9, 8), bvd::InvalidArgument);
  CHECK_THROWS_AS(Grid(8, 8, -1.0, 1.0), bvd::InvalidArgument);
  Grid g(16, 8);
  CHECK(g.spectral_size() == 16 * 5);
  CHECK(g.wave_index_x(15) == -1);
  CHECK(g.wave_index_x(8) == 8);
  CHECK(g.kx(1) == Approx(1.0));
}

TEST_CASE("transform pair", "[transform]") {
  Grid g(32, 16);

  SECTION("zero field has zero spectrum") {
    auto F = to_spectral(Field(g));
    for (auto c : F.coeffs()) CHECK(c == Complex(0.0, 0.0));
  }

  SECTION("cos x has two coefficients at k = (+-1, 0)") {
    auto F = to_spectral(Field::sample(g, [](double x, double) { return std::cos(x); }));
    int nonzero = 0;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      for (std::size_t iy = 0; iy < g.nyh(); ++iy) {
        if (std::abs(F(ix, iy)) > 1e-14) {
          ++nonzero;
          CHECK(std::abs(g.wave_index_x(ix)) == 1);
          CHECK(iy == 0);
          CHECK(F(ix, iy).real() == Approx(0.5).margin(1e-15));
        }
      }
    }
    CHECK(nonzero == 2);
  }

  SECTION("size mismatch is rejected") {
    CHECK_THROWS_AS(Field(g, std::vector<double>(10)), bvd::SizeMismatch);
    CHECK_THROWS_AS(SpectralField(g, std::vector<Complex>(10)), bvd::SizeMismatch);
  }

  SECTION("random round trip") {
    auto rng = make_rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      Field f = random_samples(g, rng);
      CHECK(rel_max_err(to_physical(to_spectral(f)), f) <= 1e-12);
    }
  }
}

TEST_CASE("Parseval holds for random fields", "[transform]") {
  Grid g(24, 32, 3.0, 5.0);
  auto rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Field f = random_samples(g, rng);
    double quad = 0.0;
    for (double v : f.values()) quad += v * v;
    quad = std::sqrt(quad * g.cell_area());
    CHECK(parseval_l2(to_spectral(f)) == Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("spectral derivative", "[derivative]") {
  Grid g(32, 32);
  auto cosx = Field::sample(g, [](double x, double) { return std::cos(x); });
  auto msinx = Field::sample(g, [](double x, double) { return -std::sin(x); });
  CHECK(max_abs_diff(derivative(cosx, Axis::x), msinx) <= 1e-12);

  auto cosy = Field::sample(g, [](double, double y) { return std::cos(y); });
  CHECK(max_abs_diff(derivative(cosy, Axis::y, 2), cosy * -1.0) <= 1e-12);

  auto yonly = Field::sample(g, [](double, double y) { return std::exp(std::sin(y)); });
  auto dx = derivative(yonly, Axis::x);
  for (double v : dx.values()) CHECK(v == 0.0);

  SECTION("x and y derivatives commute") {
    auto rng = make_rng(5);
    Field f = random_samples(g, rng);
    auto F = to_spectral(f);
    auto xy = to_physical(derivative(derivative(F, Axis::x, 1), Axis::y, 1));
    auto yx = to_physical(derivative(derivative(F, Axis::y, 1), Axis::x, 1));
    CHECK(max_abs_diff(xy, yx) <= 1e-12 * std::max(1.0, xy.grid_max_abs()));
  }

  SECTION("Nyquist lines are zeroed") {
    auto nyq = Field::sample(g, [](double x, double) { return std::cos(16.0 * x); });
    auto d2 = derivative(nyq, Axis::x, 2);
    CHECK(d2.grid_max_abs() == 0.0);
  }

  CHECK_THROWS_AS(derivative(to_spectral(cosx), Axis::x, 0), bvd::InvalidArgument);
}

TEST_CASE("2/3-rule dealiasing", "[dealias]") {
  Grid g(48, 48);
  auto rng = make_rng(8);
  SpectrumShape band{0.0, 15.0, -1.0};
  auto F = random_spectrum(g, rng, band);
  auto D = dealias(F);
  for (std::size_t i = 0; i < F.coeffs().size(); ++i) CHECK(D.coeffs()[i] == F.coeffs()[i]);

  auto nyq = to_spectral(Field::sample(g, [](double x, double) { return std::cos(24.0 * x); }));
  auto Dn = dealias(nyq);
  for (auto c : Dn.coeffs()) CHECK(c == Complex(0.0, 0.0));

  Field noise = random_samples(g, rng);
  auto once = dealias(to_spectral(noise));
  auto twice = dealias(once);
  for (std::size_t i = 0; i < once.coeffs().size(); ++i) CHECK(once.coeffs()[i] == twice.coeffs()[i]);
  // |k| = 16 = 48/3 is kept, 17 is not.
  CHECK(in_dealias_band(g, 16, 0));
  CHECK_FALSE(in_dealias_band(g, 17, 0));
  CHECK_FALSE(in_dealias_band(g, 0, 17));
}

TEST_CASE("Leray projection", "[leray]") {
  Grid g(64, 64);
  auto phi = to_spectral(Field::sample(g, smooth_phi));

  SECTION("divergence-free input is unchanged") {
    auto u = to_physical(derivative(phi, Axis::y, 1) * Complex(-1.0, 0.0));
    auto v = to_physical(derivative(phi, Axis::x, 1));
    auto [pu, pv] = leray_project(u, v);
    CHECK(max_abs_diff(pu, u) <= 1e-12 * u.grid_max_abs());
    CHECK(max_abs_diff(pv, v) <= 1e-12 * v.grid_max_abs());
  }

  SECTION("pure gradient is annihilated") {
    auto u = to_physical(derivative(phi, Axis::x, 1));
    auto v = to_physical(derivative(phi, Axis::y, 1));
    auto [pu, pv] = leray_project(u, v);
    CHECK(pu.grid_max_abs() <= 1e-12 * u.grid_max_abs());
    CHECK(pv.grid_max_abs() <= 1e-12 * v.grid_max_abs());
  }

  SECTION("random pair: divergence residual, mean preserved, idempotent") {
    auto rng = make_rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      Field u = random_samples(g, rng);
      Field v = random_samples(g, rng);
      auto [pu, pv] = leray_project(u, v);
      auto div = to_physical(divergence(to_spectral(pu), to_spectral(pv)));
      const double scale = std::sqrt(std::pow(bvd::diag::lq_norm(u, 2), 2) +
                                     std::pow(bvd::diag::lq_norm(v, 2), 2));
      CHECK(div.grid_max_abs() <= 1e-12 * scale);
      CHECK(pu.mean() == Approx(u.mean()).margin(1e-14));
      CHECK(pv.mean() == Approx(v.mean()).margin(1e-14));
      auto [qu, qv] = leray_project(pu, pv);
      CHECK(max_abs_diff(qu, pu) <= 1e-12 * scale);
      CHECK(max_abs_diff(qv, pv) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("Poisson solve", "[poisson]") {
  Grid g(32, 32);
  SECTION("single mode: rhs = cos y gives -cos y") {
    auto rhs = Field::sample(g, [](double, double y) { return std::cos(y); });
    auto sol = poisson_solve(rhs);
    CHECK(max_abs_diff(sol.phi, rhs * -1.0) <= 1e-14);
    CHECK(sol.removed_mean == Approx(0.0).margin(1e-16));
  }
  SECTION("zero rhs") {
    auto sol = poisson_solve(Field(g));
    CHECK(sol.phi.grid_max_abs() == 0.0);
  }
  SECTION("mean of rhs is removed and reported") {
    auto rhs = Field::sample(g, [](double x, double) { return 2.5 + std::sin(x); });
    auto sol = poisson_solve(rhs);
    CHECK(sol.removed_mean == Approx(2.5));
    CHECK(std::abs(sol.phi.mean()) <= 1e-15);
  }
  SECTION("random mean-zero rhs residual") {
    auto rng = make_rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      auto R = random_spectrum(g, rng, {1.0, 15.0, 0.0});
      Field rhs = to_physical(R);
      auto sol = poisson_solve(rhs);
      auto lap = to_physical(derivative(to_spectral(sol.phi), Axis::x, 2) +
                             derivative(to_spectral(sol.phi), Axis::y, 2));
      CHECK(max_abs_diff(lap, rhs) <= 1e-10 * rhs.grid_max_abs());
      // Poisson inverts the Laplacian on mean-zero fields.
      auto back = poisson_solve(laplacian(rhs)).phi;
      CHECK(max_abs_diff(back, rhs) <= 1e-10 * rhs.grid_max_abs());
    }
  }
}

TEST_CASE("spectral interpolation reproduces samples", "[pad]") {
  Grid g(16, 16);
  auto rng = make_rng(9);
  Field f = random_samples(g, rng);  // includes Nyquist content
  Field fine = to_physical(pad_spectrum(to_spectral(f), 2));
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    for (std::size_t iy = 0; iy < g.ny(); ++iy) {
      CHECK(fine(2 * ix, 2 * iy) == Approx(f(ix, iy)).margin(1e-13));
    }
  }
}

TEST_CASE("concurrent transforms match serial", "[concurrency]") {
  Grid g(64, 32);
  auto rng = make_rng(77);
  std::vector<Field> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(random_samples(g, rng));
  std::vector<SpectralField> serial;
  for (const auto& f : inputs) serial.push_back(to_spectral(f));

  std::vector<SpectralField> parallel(inputs.size(), SpectralField(g));
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    workers.emplace_back([&, i] { parallel[i] = to_spectral(inputs[i]); });
  }
  for (auto& w : workers) w.join();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < serial[i].coeffs().size(); ++k) {
      CHECK(parallel[i].coeffs()[k] == serial[i].coeffs()[k]);
    }
  }
}
