// SPDX-License-Identifier: MIT
//
// The bilinear null forms
//     Q0(a, b)        = a_t b_t - grad a . grad b
//     Q_{ab}(a, b)    = d_a a d_b b - d_a b d_b a,   0 <= alpha < beta <= n
// with index 0 denoting the time derivative, plus the operator (-Delta)^{-1/2}
// and the divergence identity Q_{i,j}(a,b) = d_i(a d_j b) - d_j(a d_i b) used
// to lower a derivative in the spatial-spatial case.
//
// All derivatives come from exact spectral symbols of the snapshots (the time
// derivative is the stored velocity field, never a difference quotient), and
// every product is formed on a grid wide enough to hold the full product
// bandwidth, so the returned samples are those of the true null form.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nullform/fft.hpp"
#include "nullform/grid.hpp"
#include "nullform/propagator.hpp"
#include "nullform/spectral_ops.hpp"

namespace nullform {

// Q0 or Q_{ab}; alpha < 0 encodes Q0.
struct NullFormKind {
  int alpha = -1;
  int beta = -1;

  static NullFormKind Q0() { return NullFormKind{-1, -1}; }
  static NullFormKind Qab(int alpha, int beta) {
    if (alpha < 0 || beta <= alpha)
      throw std::invalid_argument("NullFormKind: need 0 <= alpha < beta");
    return NullFormKind{alpha, beta};
  }

  bool is_q0() const { return alpha < 0; }
  std::string tag() const {
    return is_q0() ? "Q0" : "Q" + std::to_string(alpha) + std::to_string(beta);
  }
};

namespace detail {

struct SnapshotSpectra {
  SpectralField u, ut;
  int bw;
};

inline SnapshotSpectra snapshot_spectra(const WaveSnapshot& s) {
  SpectralField u = to_spectral(s.u), ut = to_spectral(s.ut);
  const int bw = std::max(bandwidth(u), bandwidth(ut));
  return {std::move(u), std::move(ut), bw};
}

inline void require_compatible(const WaveSnapshot& a, const WaveSnapshot& b) {
  if (!(a.u.grid == b.u.grid))
    throw std::invalid_argument("null form: snapshots live on different grids");
  if (a.t != b.t) throw std::invalid_argument("null form: snapshots taken at different times");
}

// d_alpha of a snapshot as a spectral field (alpha = 0 is time).
inline SpectralField snapshot_derivative(const SnapshotSpectra& s, int alpha) {
  return alpha == 0 ? s.ut : partial_derivative(s.u, alpha - 1);
}

}  // namespace detail

namespace detail {

// Borrowed view of one wave's (position, velocity) spectra.
struct SpectraRef {
  const SpectralField& u;
  const SpectralField& ut;
  int bw;

  SpectraRef(const SpectralField& u_, const SpectralField& ut_)
      : u(u_), ut(ut_), bw(std::max(bandwidth(u_), bandwidth(ut_))) {
    if (!(u_.grid == ut_.grid))
      throw std::invalid_argument("null form: position/velocity spectra on different grids");
  }
};

inline SpectralField ref_derivative(const SpectraRef& s, int alpha) {
  return alpha == 0 ? s.ut : partial_derivative(s.u, alpha - 1);
}

// Shared evaluation core on spectral inputs.  Every factor is rendered once
// on the common product grid M (wide enough for the full product bandwidth),
// so the samples are exact and algebraic cancellations — e.g. Q0 of a
// traveling wave with itself — hold bit-for-bit.
inline RealField q0_core(const SpectraRef& sa, const SpectraRef& sb) {
  const GridSpec& g = sa.u.grid;
  const int M = product_grid_size(g.dim, sa.bw, sb.bw);
  RealField acc{GridSpec{g.dim, M, g.L}};
  auto accumulate = [&](const SpectralField& f, const SpectralField& h, double sign) {
    const RealField pf = physical_on_grid(f, M), ph = physical_on_grid(h, M);
    for (std::size_t i = 0; i < acc.s.size(); ++i) acc.s[i] += sign * pf.s[i] * ph.s[i];
  };
  accumulate(sa.ut, sb.ut, 1.0);
  for (int ax = 0; ax < g.dim; ++ax)
    accumulate(partial_derivative(sa.u, ax), partial_derivative(sb.u, ax), -1.0);
  return acc;
}

inline RealField qab_core(const NullFormKind& kind, const SpectraRef& sa, const SpectraRef& sb) {
  const GridSpec& g = sa.u.grid;
  if (kind.beta > g.dim) throw std::invalid_argument("q_alpha_beta: index beyond dimension");
  const int M = product_grid_size(g.dim, sa.bw, sb.bw);

  const RealField da_a = physical_on_grid(ref_derivative(sa, kind.alpha), M);
  const RealField db_b = physical_on_grid(ref_derivative(sb, kind.beta), M);
  const RealField da_b = physical_on_grid(ref_derivative(sb, kind.alpha), M);
  const RealField db_a = physical_on_grid(ref_derivative(sa, kind.beta), M);

  RealField out{GridSpec{g.dim, M, g.L}};
  for (std::size_t i = 0; i < out.s.size(); ++i)
    out.s[i] = da_a.s[i] * db_b.s[i] - da_b.s[i] * db_a.s[i];
  return out;
}

}  // namespace detail

inline RealField q0(const WaveSnapshot& a, const WaveSnapshot& b) {
  detail::require_compatible(a, b);
  const auto sa = detail::snapshot_spectra(a), sb = detail::snapshot_spectra(b);
  return detail::q0_core(detail::SpectraRef(sa.u, sa.ut), detail::SpectraRef(sb.u, sb.ut));
}

inline RealField q_alpha_beta(const NullFormKind& kind, const WaveSnapshot& a,
                              const WaveSnapshot& b) {
  if (kind.is_q0()) throw std::invalid_argument("q_alpha_beta: kind is Q0");
  detail::require_compatible(a, b);
  const auto sa = detail::snapshot_spectra(a), sb = detail::snapshot_spectra(b);
  return detail::qab_core(kind, detail::SpectraRef(sa.u, sa.ut), detail::SpectraRef(sb.u, sb.ut));
}

inline RealField apply_nullform(const NullFormKind& kind, const WaveSnapshot& a,
                                const WaveSnapshot& b) {
  return kind.is_q0() ? q0(a, b) : q_alpha_beta(kind, a, b);
}

// Spectral-input variants: evaluate the null form of two waves given directly
// by (position, velocity) spectra — e.g. straight out of evolve_hat — without
// the full-grid physical round trip.  Semantically identical to the snapshot
// forms; preferred inside quadrature loops.
inline RealField apply_nullform_hat(const NullFormKind& kind, const SpectralField& uh,
                                    const SpectralField& uth, const SpectralField& vh,
                                    const SpectralField& vth) {
  if (!(uh.grid == vh.grid))
    throw std::invalid_argument("null form: waves live on different grids");
  const detail::SpectraRef sa(uh, uth), sb(vh, vth);
  return kind.is_q0() ? detail::q0_core(sa, sb) : detail::qab_core(kind, sa, sb);
}

inline SpectralField inv_sqrt_laplacian(const SpectralField& f) {
  SpectralField out(f.grid);
  const double L = f.grid.L;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const auto i = static_cast<std::size_t>(idx);
    out.c[i] = f.c[i] * (L / lattice_norm(xi));
  });
  out.c[0] = cplx{0.0, 0.0};
  return out;
}

// Multiplier L/|xi| on a zero-mean field; the mean must vanish for the
// symbol to make sense, so a substantive mean is rejected.
inline RealField inv_sqrt_laplacian(const RealField& f) {
  SpectralField fh = to_spectral(f);
  const double norm = l2_norm(fh);
  if (std::abs(fh.c[0].real()) * std::sqrt(f.grid.volume()) > 1e-12 * norm && norm > 0.0)
    throw std::invalid_argument("inv_sqrt_laplacian: field has a nonzero mean");
  return to_physical(inv_sqrt_laplacian(fh));
}

// Relative L^2 residual of Q_{i,j}(a,b) = d_i(a d_j b) - d_j(a d_i b) with
// 1-based spatial indices i != j; both sides are evaluated on the common
// product grid, the right side by differentiating the de-aliased products
// spectrally.
inline double check_qij_divergence_identity(int i, int j, const WaveSnapshot& a,
                                            const WaveSnapshot& b) {
  const int dim = a.u.grid.dim;
  if (i < 1 || j < 1 || i > dim || j > dim || i == j)
    throw std::invalid_argument("check_qij_divergence_identity: bad spatial indices");
  detail::require_compatible(a, b);

  const RealField lhs = q_alpha_beta(NullFormKind::Qab(i, j), a, b);

  const auto sa = detail::snapshot_spectra(a), sb = detail::snapshot_spectra(b);
  const int M = lhs.grid.npts;
  const RealField av = physical_on_grid(sa.u, M);
  auto flux = [&](int ax) {  // a * d_ax b sampled on the product grid
    const RealField dbx = physical_on_grid(partial_derivative(sb.u, ax), M);
    RealField p{lhs.grid};
    for (std::size_t k = 0; k < p.s.size(); ++k) p.s[k] = av.s[k] * dbx.s[k];
    return to_spectral(p);
  };
  const SpectralField rhs_h = [&] {
    SpectralField d1 = partial_derivative(flux(j - 1), i - 1);
    const SpectralField d2 = partial_derivative(flux(i - 1), j - 1);
    for (std::size_t k = 0; k < d1.c.size(); ++k) d1.c[k] -= d2.c[k];
    return d1;
  }();
  const RealField rhs = to_physical(rhs_h);

  double num = 0.0;
  for (std::size_t k = 0; k < lhs.s.size(); ++k) {
    const double d = lhs.s[k] - rhs.s[k];
    num += d * d;
  }
  const double denom = l2_norm(lhs);
  const double diff = std::sqrt(num * lhs.grid.cell_volume());
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace nullform
