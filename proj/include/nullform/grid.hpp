// SPDX-License-Identifier: MIT
#pragma once
// Periodic grids and the two field containers (sampled and spectral).
//
// Conventions used throughout the library:
//   * physical domain [0, 2*pi*L)^dim, sampled on N points per axis;
//   * fields are real trigonometric polynomials
//       f(x) = sum_xi fhat(xi) exp(i xi.x / L),  xi in Z^dim,
//     band-limited to |xi_axis| <= N/2 - 1;
//   * Parseval: integral |f|^2 dx = (2*pi*L)^dim * sum_xi |fhat(xi)|^2;
//   * spectra are stored in real-to-complex half layout (last axis holds
//     frequencies 0..N/2) with Hermitian symmetry fhat(-xi) = conj fhat(xi)
//     implied; Nyquist bins (any |xi_axis| = N/2) are kept identically zero.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullform {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct GridSpec {
  int dim = 2;     // spatial dimension n in {1,2,3}
  int npts = 8;    // points per axis N (even, >= 8)
  double L = 1.0;  // box scale; frequency lattice is Z^dim / L

  void validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridSpec: dim must be 1, 2 or 3");
    if (npts < 8 || npts % 2 != 0) throw std::invalid_argument("GridSpec: npts must be even and >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("GridSpec: box scale must be positive");
  }

  std::int64_t total() const {
    std::int64_t t = 1;
    for (int a = 0; a < dim; ++a) t *= npts;
    return t;
  }
  // number of stored half-spectrum coefficients
  std::int64_t spec_total() const {
    std::int64_t t = npts / 2 + 1;
    for (int a = 0; a < dim - 1; ++a) t *= npts;
    return t;
  }
  double volume() const { return std::pow(2.0 * kPi * L, dim); }
  double cell_volume() const { return volume() / static_cast<double>(total()); }
  // highest representable frequency per axis (band limit)
  int max_freq() const { return npts / 2 - 1; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim == b.dim && a.npts == b.npts && a.L == b.L;
  }
};

// signed lattice frequency of a stored index along a full (non-halved) axis
inline int freq_of(int i, int N) { return i <= N / 2 ? i : i - N; }
// stored index of a signed lattice frequency along a full axis
inline int index_of_freq(int f, int N) { return f >= 0 ? f : f + N; }

struct RealField {
  GridSpec grid;
  std::vector<double> s;  // row-major samples, N^dim

  RealField() = default;
  explicit RealField(const GridSpec& g) : grid(g), s(static_cast<std::size_t>(g.total()), 0.0) {
    grid.validate();
  }
  double& at(std::int64_t i) { return s[static_cast<std::size_t>(i)]; }
  double at(std::int64_t i) const { return s[static_cast<std::size_t>(i)]; }
};

struct SpectralField {
  GridSpec grid;
  std::vector<cplx> c;  // half-spectrum, last axis 0..N/2

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g)
      : grid(g), c(static_cast<std::size_t>(g.spec_total()), cplx{0.0, 0.0}) {
    grid.validate();
  }

  // flat index of a stored (non-negative last frequency) lattice point
  std::int64_t index(std::array<int, 3> xi) const {
    const int N = grid.npts, Nh = N / 2 + 1;
    switch (grid.dim) {
      case 1: return xi[0];
      case 2: return static_cast<std::int64_t>(index_of_freq(xi[0], N)) * Nh + xi[1];
      default:
        return (static_cast<std::int64_t>(index_of_freq(xi[0], N)) * N + index_of_freq(xi[1], N)) * Nh + xi[2];
    }
  }

  // coefficient at an arbitrary lattice frequency (uses Hermitian symmetry)
  cplx at(std::array<int, 3> xi) const {
    for (int a = grid.dim; a < 3; ++a) xi[a] = 0;
    if (xi[grid.dim - 1] < 0) {
      for (int a = 0; a < grid.dim; ++a) xi[a] = -xi[a];
      return std::conj(c[static_cast<std::size_t>(index(xi))]);
    }
    return c[static_cast<std::size_t>(index(xi))];
  }

  // set a coefficient, maintaining the Hermitian constraint on the
  // last-frequency-zero plane (whose mirror is also stored)
  void set(std::array<int, 3> xi, cplx v) {
    for (int a = grid.dim; a < 3; ++a) xi[a] = 0;
    if (xi[grid.dim - 1] < 0) {
      for (int a = 0; a < grid.dim; ++a) xi[a] = -xi[a];
      v = std::conj(v);
    }
    c[static_cast<std::size_t>(index(xi))] = v;
    if (xi[grid.dim - 1] == 0) {
      bool origin = true;
      std::array<int, 3> m{0, 0, 0};
      for (int a = 0; a < grid.dim; ++a) {
        m[a] = -xi[a];
        if (xi[a] != 0) origin = false;
      }
      if (!origin) c[static_cast<std::size_t>(index(m))] = std::conj(v);
    }
  }

  cplx mean_coeff() const { return c[0]; }
};

// Iterate all stored non-Nyquist modes. F receives (flat_index, xi, weight)
// where xi is the signed lattice frequency (entries beyond dim are zero) and
// weight is the Parseval multiplicity of the stored coefficient (2 when the
// conjugate mate is not stored, else 1).
template <typename F>
void for_each_mode(const GridSpec& g, F&& f) {
  const int N = g.npts, Nh = N / 2 + 1, half = N / 2;
  std::array<int, 3> xi{0, 0, 0};
  if (g.dim == 1) {
    for (int k = 0; k < half; ++k) {  // skip Nyquist k = N/2
      xi[0] = k;
      f(static_cast<std::int64_t>(k), xi, k > 0 ? 2.0 : 1.0);
    }
    return;
  }
  if (g.dim == 2) {
    for (int i0 = 0; i0 < N; ++i0) {
      const int f0 = freq_of(i0, N);
      if (f0 == half) continue;
      xi[0] = f0;
      const std::int64_t row = static_cast<std::int64_t>(i0) * Nh;
      for (int k = 0; k < half; ++k) {
        xi[1] = k;
        f(row + k, xi, k > 0 ? 2.0 : 1.0);
      }
    }
    return;
  }
  for (int i0 = 0; i0 < N; ++i0) {
    const int f0 = freq_of(i0, N);
    if (f0 == half) continue;
    xi[0] = f0;
    for (int i1 = 0; i1 < N; ++i1) {
      const int f1 = freq_of(i1, N);
      if (f1 == half) continue;
      xi[1] = f1;
      const std::int64_t row = (static_cast<std::int64_t>(i0) * N + i1) * Nh;
      for (int k = 0; k < half; ++k) {
        xi[2] = k;
        f(row + k, xi, k > 0 ? 2.0 : 1.0);
      }
    }
  }
}

// Euclidean norm of a lattice frequency
inline double lattice_norm(const std::array<int, 3>& xi) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += static_cast<double>(xi[a]) * xi[a];
  return std::sqrt(s);
}

// largest per-axis absolute frequency carried by nonzero coefficients
inline int bandwidth(const SpectralField& f) {
  int b = 0;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    if (f.c[static_cast<std::size_t>(idx)] != cplx{0.0, 0.0}) {
      for (int a = 0; a < f.grid.dim; ++a) b = std::max(b, std::abs(xi[a]));
    }
  });
  return b;
}

// largest Euclidean lattice radius carried by nonzero coefficients
inline double spectral_radius(const SpectralField& f) {
  double r2 = 0.0;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    if (f.c[static_cast<std::size_t>(idx)] != cplx{0.0, 0.0}) {
      double s = 0.0;
      for (int a = 0; a < f.grid.dim; ++a) s += static_cast<double>(xi[a]) * xi[a];
      r2 = std::max(r2, s);
    }
  });
  return std::sqrt(r2);
}

}  // namespace nullform
