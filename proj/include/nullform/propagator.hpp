// SPDX-License-Identifier: MIT
//
// Exact free-wave evolution on the periodic box.
//
// For zero-mean Cauchy data (phi0, phi1) the solution of
//     u_tt = Laplace(u),   u(0) = phi0,  u_t(0) = phi1
// is diagonal in Fourier: with omega = |xi|/L,
//     u^(t, xi)   =  cos(t omega) phi0^(xi) + sin(t omega)/omega phi1^(xi)
//     u_t^(t, xi) = -omega sin(t omega) phi0^(xi) + cos(t omega) phi1^(xi).
// Both multipliers are evaluated in closed form, so a snapshot at any time t
// carries no discretisation error beyond roundoff and stays band-limited with
// the bandwidth of the data.  The xi = 0 mode is annihilated throughout: all
// fields here live in the zero-mean sector where the energy controls the full
// H^1 x L^2 size of the state.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "nullform/fft.hpp"
#include "nullform/grid.hpp"
#include "nullform/spectral_ops.hpp"

namespace nullform {

// Cauchy data with the spectra cached once; every evolution query works off
// the spectra, so the cost of a snapshot is independent of how the data were
// produced.
struct CauchyData {
  SpectralField phi0;
  SpectralField phi1;

  const GridSpec& grid() const { return phi0.grid; }
};

inline CauchyData make_cauchy(SpectralField phi0, SpectralField phi1) {
  if (!(phi0.grid == phi1.grid))
    throw std::invalid_argument("make_cauchy: position/velocity grids differ");
  phi0.grid.validate();
  // Project onto the zero-mean sector; the propagator is only defined there.
  phi0.c[0] = cplx{0.0, 0.0};
  phi1.c[0] = cplx{0.0, 0.0};
  return CauchyData{std::move(phi0), std::move(phi1)};
}

inline CauchyData make_cauchy(const RealField& phi0, const RealField& phi1) {
  return make_cauchy(to_spectral(phi0), to_spectral(phi1));
}

// (u^(t), u_t^(t)) as spectral fields; the workhorse used by every driver.
inline std::pair<SpectralField, SpectralField> evolve_hat(const CauchyData& d, double t) {
  SpectralField u(d.grid()), ut(d.grid());
  const double L = d.grid().L;
  for_each_mode(d.grid(), [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const auto i = static_cast<std::size_t>(idx);
    const cplx a = d.phi0.c[i], b = d.phi1.c[i];
    if (a == cplx{0.0, 0.0} && b == cplx{0.0, 0.0}) return;
    const double omega = lattice_norm(xi) / L;
    const double c = std::cos(t * omega), s = std::sin(t * omega);
    u.c[i] = c * a + (s / omega) * b;
    ut.c[i] = -omega * s * a + c * b;
  });
  return {std::move(u), std::move(ut)};
}

// A solution sample: position and velocity fields at one time.
struct WaveSnapshot {
  double t = 0.0;
  RealField u;
  RealField ut;
};

inline WaveSnapshot evolve(const CauchyData& d, double t) {
  auto [uh, uth] = evolve_hat(d, t);
  return WaveSnapshot{t, to_physical(uh), to_physical(uth)};
}

// Conserved energy E = 1/2 int (u_t^2 + |grad u|^2) evaluated by Parseval on
// the cached data spectra (exact, no grid products involved).
inline double energy(const CauchyData& d) {
  const double L = d.grid().L;
  double sum = 0.0;
  for_each_mode(d.grid(), [&](std::int64_t idx, const std::array<int, 3>& xi, double w) {
    const auto i = static_cast<std::size_t>(idx);
    const double omega = lattice_norm(xi) / L;
    sum += w * (std::norm(d.phi1.c[i]) + omega * omega * std::norm(d.phi0.c[i]));
  });
  return 0.5 * d.grid().volume() * sum;
}

// Pointwise energy density e = 1/2 (u_t^2 + |grad u|^2) of a snapshot,
// returned on a product grid fine enough that its integral (grid sum times
// cell volume) is exact.
inline RealField energy_density(const WaveSnapshot& s) {
  const SpectralField uh = to_spectral(s.u);
  const SpectralField uth = to_spectral(s.ut);
  const int B = std::max(bandwidth(uh), bandwidth(uth));
  const int M = next_fast_even(4 * B + 2);
  detail::check_padded_cap(s.u.grid.dim, M);
  const int dim = s.u.grid.dim;

  RealField acc{GridSpec{dim, M, s.u.grid.L}};
  auto add_square = [&](const SpectralField& f) {
    const RealField v = physical_on_grid(f, M);
    for (std::size_t i = 0; i < acc.s.size(); ++i) acc.s[i] += v.s[i] * v.s[i];
  };
  add_square(uth);
  for (int a = 0; a < dim; ++a) add_square(partial_derivative(uh, a));
  for (double& x : acc.s) x *= 0.5;
  return acc;
}

// Travelling plane wave along a single lattice mode: data whose evolution is
// u(t, x) = cos(xi . x / L - sgn * t |xi| / L).  Useful as a closed-form
// oracle: all derivatives and norms are elementary.
inline CauchyData plane_wave_data(const GridSpec& g, const std::array<int, 3>& xi, int sgn = 1) {
  g.validate();
  if (sgn != 1 && sgn != -1) throw std::invalid_argument("plane_wave_data: sgn must be +-1");
  bool zero = true;
  for (int a = 0; a < g.dim; ++a) {
    if (xi[a] != 0) zero = false;
    if (std::abs(xi[a]) > g.max_freq())
      throw std::invalid_argument("plane_wave_data: mode outside the band");
  }
  for (int a = g.dim; a < 3; ++a)
    if (xi[a] != 0) throw std::invalid_argument("plane_wave_data: mode has components beyond dim");
  if (zero) throw std::invalid_argument("plane_wave_data: zero mode carries no wave");

  const double omega = lattice_norm(xi) / g.L;
  SpectralField phi0(g), phi1(g);
  // cos(xi.x/L) has coefficients 1/2 at +-xi; u_t(0) = sgn * omega sin(xi.x/L)
  // has coefficient -i sgn omega / 2 at +xi.
  phi0.set(xi, cplx{0.5, 0.0});
  phi1.set(xi, cplx{0.0, -0.5 * sgn * omega});
  return make_cauchy(std::move(phi0), std::move(phi1));
}

}  // namespace nullform
