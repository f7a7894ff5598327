// SPDX-License-Identifier: MIT
#pragma once
// Fourier multiplier calculus, spectral differentiation, de-aliased products,
// and exact Lp norms of band-limited fields.
//
// Exactness notes used repeatedly below:
//   * sampling a trigonometric polynomial is always exact; aliasing can only
//     corrupt grid *sums* or transforms taken after a nonlinear operation;
//   * the plain grid sum of h equals its mean coefficient whenever the
//     bandwidth of h is < N per axis, so for f band-limited to N/2 - 1 the
//     grid sum of f^2 on f's own grid is already the exact integral;
//   * products of two fields are represented exactly on any grid with
//     M >= 2 (B_f + B_g) + 2 points per axis.

#include <functional>

#include "nullform/fft.hpp"
#include "nullform/grid.hpp"

namespace nullform {

// memory guard for padded product grids
inline constexpr std::int64_t kPaddedGridByteCap = static_cast<std::int64_t>(3) << 30;

// d/dx_axis: coefficient-wise multiplication by i * xi_axis / L
inline SpectralField partial_derivative(const SpectralField& f, int axis) {
  if (axis < 0 || axis >= f.grid.dim) throw std::invalid_argument("partial_derivative: bad axis");
  SpectralField out(f.grid);
  const double invL = 1.0 / f.grid.L;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const auto i = static_cast<std::size_t>(idx);
    out.c[i] = cplx{0.0, xi[axis] * invL} * f.c[i];
  });
  return out;
}

// Apply a real even symbol m(xi) (lattice argument; physical frequency is
// xi/L). Odd symbols would break the realness of the field and are rejected
// by a spot check on a few probe frequencies.
template <typename Symbol>
SpectralField apply_multiplier(const SpectralField& f, Symbol&& m) {
  const int probe = std::min(f.grid.max_freq(), 3);
  for (int v = 1; v <= probe; ++v) {
    std::array<int, 3> xi{v, 0, 0}, mi{-v, 0, 0};
    if (f.grid.dim >= 2) {
      xi[1] = (v % 2) ? v - 1 : v;
      mi[1] = -xi[1];
    }
    const double a = m(xi), b = m(mi);
    if (!(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a))))
      throw std::invalid_argument("apply_multiplier: symbol is not even in xi");
  }
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const auto i = static_cast<std::size_t>(idx);
    out.c[i] = m(xi) * f.c[i];
  });
  return out;
}

namespace detail {
inline void check_padded_cap(int dim, int M) {
  std::int64_t cells = 1;
  for (int a = 0; a < dim; ++a) cells *= M;
  // three sample buffers plus one half-spectrum in flight
  if (cells * 40 > kPaddedGridByteCap)
    throw std::runtime_error("dealiased_product: padded grid of " + std::to_string(M) +
                             "^" + std::to_string(dim) + " exceeds the configured memory cap");
}
}  // namespace detail

// grid size on which the product of two spectra is represented exactly
inline int product_grid_size(int dim, int bw_f, int bw_g) {
  const int M = next_fast_even(2 * (bw_f + bw_g) + 2);
  detail::check_padded_cap(dim, M);
  return M;
}

inline int product_grid_size(const SpectralField& fh, const SpectralField& gh) {
  return product_grid_size(fh.grid.dim, bandwidth(fh), bandwidth(gh));
}

// Pointwise product, evaluated on a zero-padded grid large enough that the
// result (bandwidth B_f + B_g per axis) is represented exactly. The returned
// field lives on the padded grid.
inline RealField dealiased_product_spectral(const SpectralField& fh, const SpectralField& gh) {
  if (!(fh.grid == gh.grid)) throw std::invalid_argument("dealiased_product: grid mismatch");
  const int M = product_grid_size(fh, gh);
  RealField pf = physical_on_grid(fh, M);
  const RealField pg = physical_on_grid(gh, M);
  for (std::size_t i = 0; i < pf.s.size(); ++i) pf.s[i] *= pg.s[i];
  return pf;
}

inline RealField dealiased_product(const RealField& f, const RealField& g) {
  return dealiased_product_spectral(to_spectral(f), to_spectral(g));
}

// exact integral over the box of a field whose per-axis bandwidth is < N
inline double integral(const RealField& f) {
  double s = 0.0;
  for (double v : f.s) s += v;
  return s * f.grid.cell_volume();
}

inline double mean_value(const RealField& f) { return integral(f) / f.grid.volume(); }

// exact L2 norm via the grid sum of f^2 (see exactness notes above)
inline double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.s) s += v * v;
  return std::sqrt(s * f.grid.cell_volume());
}

// L2 norm from coefficients: ((2 pi L)^n sum w |c|^2)^{1/2}
inline double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>&, double w) {
    s += w * std::norm(f.c[static_cast<std::size_t>(idx)]);
  });
  return std::sqrt(s * f.grid.volume());
}

// exact Parseval pairing integral f g dx = (2 pi L)^n sum w Re(fhat conj ghat)
inline double parseval_pair(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("parseval_pair: grid mismatch");
  double s = 0.0;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>&, double w) {
    const auto i = static_cast<std::size_t>(idx);
    s += w * (f.c[i] * std::conj(g.c[i])).real();
  });
  return s * f.grid.volume();
}

// Exact Lp norms of band-limited fields, p in {2, 4}. The L4 norm is
// computed as ||f^2||_{L2}^{1/2} with the square formed de-aliased.
inline double lp_norm_physical(const RealField& f, int p) {
  if (p == 2) return l2_norm(f);
  if (p != 4) throw std::invalid_argument("lp_norm_physical: p must be 2 or 4");
  const RealField sq = dealiased_product(f, f);
  return std::sqrt(l2_norm(sq));
}

// L4 fast path from a spectrum: one padded inverse transform, then the exact
// quartic grid sum (f^4 has bandwidth 4B <= M - 2 on the padded grid).
inline double l4_norm_spectral(const SpectralField& fh) {
  const int M = next_fast_even(4 * bandwidth(fh) + 2);
  detail::check_padded_cap(fh.grid.dim, M);
  const RealField p = physical_on_grid(fh, M);
  double s = 0.0;
  for (double v : p.s) {
    const double v2 = v * v;
    s += v2 * v2;
  }
  return std::pow(s * p.grid.cell_volume(), 0.25);
}

// project away the mean (xi = 0 coefficient)
inline void remove_mean(SpectralField& f) { f.c[0] = cplx{0.0, 0.0}; }

}  // namespace nullform
