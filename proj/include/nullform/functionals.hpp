// SPDX-License-Identifier: MIT
//
// Integral functionals of wave snapshots:
//   * per-slice energies along a distinguished axis (the building blocks of
//     the directional energy inequality),
//   * space-time L^p norms over the unit time interval,
//   * homogeneous Sobolev and Besov norms of data.
//
// Slice functionals.  For a solution f and a slicing axis (x1 by default),
// with y the remaining coordinates,
//   D+-(x1) = int (f_t +- f_x1)^2 dy     P(x1)  = int f_t f_x1 dy
//   E1(x1)  = int e(f) dy                E2(x1) = int |grad_y f|^2 dy
// where e(f) = 1/2 (f_t^2 + |grad f|^2).  Writing e(f) as
// 1/4 (f_t + f_x1)^2 + 1/4 (f_t - f_x1)^2 + 1/2 |grad_y f|^2 gives the two
// algebraic identities 4 E1 = D+ + D- + 2 E2 and 4 P = D+ - D-, which hold
// per slice at roundoff and are asserted by the verification drivers.
//
// Exactness.  All fields are evaluated on a common grid with
// M >= 4 B + 2 points per axis (B the snapshot bandwidth).  Slice values are
// then exact: the y-sum of a quadratic has y-bandwidth <= 2B < M.  So are
// x1-sums of PRODUCTS of two slice profiles (bandwidth <= 4B < M), which is
// what the directional inequality integrates.
//
// Time integrals use the composite Gauss-Legendre rule of quadrature.hpp and
// every reported value is re-computed with doubled panels; a relative shift
// beyond 1e-9 raises ConvergenceError instead of returning a bad number.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "nullform/decomposition.hpp"
#include "nullform/fft.hpp"
#include "nullform/grid.hpp"
#include "nullform/propagator.hpp"
#include "nullform/quadrature.hpp"
#include "nullform/spectral_ops.hpp"

namespace nullform {

struct SliceProfile {
  double t = 0.0;
  int axis = 0;
  double dx = 0.0;  // slice spacing; sum(values) * dx integrates over the axis
  std::vector<double> E1, E2, Dplus, Dminus, P;

  int slices() const { return static_cast<int>(E1.size()); }
};

inline SliceProfile slice_functionals(const WaveSnapshot& s, int axis = 0) {
  const int dim = s.u.grid.dim;
  if (dim < 2) throw std::invalid_argument("slice_functionals: needs n >= 2");
  if (axis < 0 || axis >= dim) throw std::invalid_argument("slice_functionals: axis out of range");

  const SpectralField uh = to_spectral(s.u), uth = to_spectral(s.ut);
  const int B = std::max(bandwidth(uh), bandwidth(uth));
  const int M = next_fast_even(4 * B + 2);
  detail::check_padded_cap(dim, M);

  const RealField ut = physical_on_grid(uth, M);
  std::vector<RealField> du;
  du.reserve(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) du.push_back(physical_on_grid(partial_derivative(uh, a), M));

  SliceProfile out;
  out.t = s.t;
  out.axis = axis;
  out.dx = 2.0 * kPi * s.u.grid.L / M;
  out.E1.assign(M, 0.0);
  out.E2.assign(M, 0.0);
  out.Dplus.assign(M, 0.0);
  out.Dminus.assign(M, 0.0);
  out.P.assign(M, 0.0);

  double dvy = 1.0;
  for (int a = 1; a < dim; ++a) dvy *= 2.0 * kPi * s.u.grid.L / M;

  std::int64_t stride = 1;
  for (int a = axis + 1; a < dim; ++a) stride *= M;

  const std::int64_t total = ut.grid.total();
  for (std::int64_t i = 0; i < total; ++i) {
    const int slice = static_cast<int>((i / stride) % M);
    const auto k = static_cast<std::size_t>(i);
    const double vt = ut.s[k], vx = du[static_cast<std::size_t>(axis)].s[k];
    double grad2 = 0.0, grady2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = du[static_cast<std::size_t>(a)].s[k];
      grad2 += d * d;
      if (a != axis) grady2 += d * d;
    }
    const double p = vt + vx, m = vt - vx;
    out.E1[static_cast<std::size_t>(slice)] += 0.5 * (vt * vt + grad2);
    out.E2[static_cast<std::size_t>(slice)] += grady2;
    out.Dplus[static_cast<std::size_t>(slice)] += p * p;
    out.Dminus[static_cast<std::size_t>(slice)] += m * m;
    out.P[static_cast<std::size_t>(slice)] += vt * vx;
  }
  for (int sl = 0; sl < M; ++sl) {
    const auto k = static_cast<std::size_t>(sl);
    out.E1[k] *= dvy;
    out.E2[k] *= dvy;
    out.Dplus[k] *= dvy;
    out.Dminus[k] *= dvy;
    out.P[k] *= dvy;
  }
  return out;
}

namespace detail {

// Shared refine-and-compare skeleton for quadrature-reported values.
template <typename Eval>
double self_checked(const char* what, const TimeQuadrature& quad, Eval&& eval) {
  const double coarse = eval(quad);
  const double fine = eval(quad.refined());
  const double scale = std::max(std::abs(coarse), std::abs(fine));
  if (std::abs(coarse - fine) > 1e-9 * scale && scale > 0.0)
    throw ConvergenceError(std::string(what) + ": quadrature refinement moved the value", coarse,
                           fine);
  return fine;
}

}  // namespace detail

// (int_0^1 ||F(t)||_{L^p}^p dt)^{1/p} for p in {2,4}.  F must be band-limited
// in time within quad.max_time_frequency; the doubled-panel self-check guards
// against an undersized rule.
inline double spacetime_norm(const std::function<RealField(double)>& F, int p,
                             const TimeQuadrature& quad) {
  if (p != 2 && p != 4) throw std::invalid_argument("spacetime_norm: p must be 2 or 4");
  auto eval = [&](const TimeQuadrature& q) {
    double acc = 0.0;
    for (const auto& [t, w] : q.nodes()) {
      const RealField f = F(t);
      const double v = p == 2 ? l2_norm(f) : lp_norm_physical(f, 4);
      acc += w * (p == 2 ? v * v : v * v * v * v);
    }
    return std::pow(acc, 1.0 / p);
  };
  return detail::self_checked("spacetime_norm", quad, eval);
}

// ((2 pi L)^n sum |xi/L|^{2s} |f^(xi)|^2)^{1/2}; the mean is excluded and,
// for negative s where it would be divided by zero, rejected.
inline double homogeneous_sobolev_norm(const SpectralField& fh, double s) {
  const double L = fh.grid.L;
  if (s < 0.0) {
    const double norm = l2_norm(fh);
    if (std::abs(fh.c[0].real()) * std::sqrt(fh.grid.volume()) > 1e-12 * norm && norm > 0.0)
      throw std::invalid_argument("homogeneous_sobolev_norm: mean mode with negative s");
  }
  double acc = 0.0;
  for_each_mode(fh.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double w) {
    const double p = std::norm(fh.c[static_cast<std::size_t>(idx)]);
    if (p == 0.0) return;
    acc += w * std::pow(lattice_norm(xi) / L, 2.0 * s) * p;
  });
  return std::sqrt(fh.grid.volume() * acc);
}

inline double homogeneous_sobolev_norm(const RealField& f, double s) {
  return homogeneous_sobolev_norm(to_spectral(f), s);
}

// sum_lam lam^s ||P_lam f||_{L^2} over the shells the lattice content meets.
// Homogeneous seminorm: the zero mode belongs to no dyadic shell, so the
// spatial mean never contributes (the torus analogue of killing constants).
inline double besov_norm(const SpectralField& fh, double s) {
  const double L = fh.grid.L;
  std::map<int, double> bucket;  // shell index -> sum of |c|^2 weights
  for_each_mode(fh.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double w) {
    if (xi[0] == 0 && xi[1] == 0 && xi[2] == 0) return;
    const double p = std::norm(fh.c[static_cast<std::size_t>(idx)]);
    if (p == 0.0) return;
    bucket[shell_index(lattice_norm(xi) / L)] += w * p;
  });
  double acc = 0.0;
  for (const auto& [j, sq] : bucket)
    acc += std::pow(std::ldexp(1.0, j), s) * std::sqrt(fh.grid.volume() * sq);
  return acc;
}

inline double besov_norm(const RealField& f, double s) { return besov_norm(to_spectral(f), s); }

// (int_0^1 besov_norm(F(t), s)^2 dt)^{1/2} with the same self-check.
inline double time_l2_besov_norm(const std::function<RealField(double)>& F, double s,
                                 const TimeQuadrature& quad) {
  auto eval = [&](const TimeQuadrature& q) {
    double acc = 0.0;
    for (const auto& [t, w] : q.nodes()) {
      const double b = besov_norm(F(t), s);
      acc += w * b * b;
    }
    return std::sqrt(acc);
  };
  return detail::self_checked("time_l2_besov_norm", quad, eval);
}

}  // namespace nullform
