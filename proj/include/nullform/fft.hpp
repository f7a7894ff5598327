// SPDX-License-Identifier: MIT
#pragma once
// FFTW-backed transforms between sampled and spectral representations.
//
// Plans are created with FFTW_ESTIMATE only: FFTW_MEASURE picks algorithms by
// timing experiments, which perturbs floating-point summation order between
// runs and would break the bitwise reproducibility the harness promises.
// Each thread keeps its own plan cache (plan execution is only thread-safe on
// distinct plans); plan creation is serialized by a global mutex because the
// FFTW planner itself is not thread-safe.

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "nullform/grid.hpp"

namespace nullform {

namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  struct Entry {
    fftw_plan plan = nullptr;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    std::int64_t rtotal = 0, stotal = 0;
  };

  static FftPlans& local() {
    thread_local FftPlans inst;
    return inst;
  }

  // forward = true: real-to-complex; false: complex-to-real.
  // dims holds the per-axis sizes (entries beyond rank ignored).
  Entry& get(bool forward, int rank, const std::array<int, 3>& dims) {
    const auto key = std::make_tuple(forward ? 0 : 1, rank, dims[0],
                                     rank > 1 ? dims[1] : 1, rank > 2 ? dims[2] : 1);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    Entry e;
    e.rtotal = 1;
    for (int a = 0; a < rank; ++a) e.rtotal *= dims[a];
    e.stotal = (e.rtotal / dims[rank - 1]) * (dims[rank - 1] / 2 + 1);
    e.real = fftw_alloc_real(static_cast<std::size_t>(e.rtotal));
    e.spec = fftw_alloc_complex(static_cast<std::size_t>(e.stotal));
    if (!e.real || !e.spec) throw std::bad_alloc();
    int d[3] = {dims[0], dims[1], dims[2]};
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      e.plan = forward ? fftw_plan_dft_r2c(rank, d, e.real, e.spec, FFTW_ESTIMATE)
                       : fftw_plan_dft_c2r(rank, d, e.spec, e.real, FFTW_ESTIMATE);
    }
    if (!e.plan) throw std::runtime_error("fft: plan creation failed");
    return cache_.emplace(key, e).first->second;
  }

  Entry& get(bool forward, const GridSpec& g) {
    return get(forward, g.dim, {g.npts, g.npts, g.npts});
  }

  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [k, e] : cache_) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.real);
      fftw_free(e.spec);
    }
  }

 private:
  std::map<std::tuple<int, int, int, int, int>, Entry> cache_;
};

}  // namespace detail

// zero every stored bin with a Nyquist component (|xi_axis| = N/2)
inline void zero_nyquist(SpectralField& f) {
  const int N = f.grid.npts, Nh = N / 2 + 1, half = N / 2;
  auto* c = f.c.data();
  if (f.grid.dim == 1) {
    c[half] = cplx{0.0, 0.0};
    return;
  }
  if (f.grid.dim == 2) {
    for (int i0 = 0; i0 < N; ++i0) {
      const bool ny0 = freq_of(i0, N) == half;
      cplx* row = c + static_cast<std::int64_t>(i0) * Nh;
      if (ny0) {
        for (int k = 0; k < Nh; ++k) row[k] = cplx{0.0, 0.0};
      } else {
        row[half] = cplx{0.0, 0.0};
      }
    }
    return;
  }
  for (int i0 = 0; i0 < N; ++i0) {
    const bool ny0 = freq_of(i0, N) == half;
    for (int i1 = 0; i1 < N; ++i1) {
      const bool ny1 = freq_of(i1, N) == half;
      cplx* row = c + (static_cast<std::int64_t>(i0) * N + i1) * Nh;
      if (ny0 || ny1) {
        for (int k = 0; k < Nh; ++k) row[k] = cplx{0.0, 0.0};
      } else {
        row[half] = cplx{0.0, 0.0};
      }
    }
  }
}

// Forward transform. Produces coefficients of exp(i xi.x/L); projects away
// Nyquist bins so the result satisfies the band-limit invariant.
inline SpectralField to_spectral(const RealField& f) {
  for (double v : f.s)
    if (!std::isfinite(v)) throw std::invalid_argument("to_spectral: non-finite sample");
  auto& entry = detail::FftPlans::local().get(true, f.grid);
  std::copy(f.s.begin(), f.s.end(), entry.real);
  fftw_execute(entry.plan);
  SpectralField out(f.grid);
  const double scale = 1.0 / static_cast<double>(f.grid.total());
  for (std::int64_t i = 0; i < entry.stotal; ++i)
    out.c[static_cast<std::size_t>(i)] = cplx{entry.spec[i][0] * scale, entry.spec[i][1] * scale};
  zero_nyquist(out);
  return out;
}

// Inverse transform (exact for band-limited spectra).
inline RealField to_physical(const SpectralField& f) {
  auto& entry = detail::FftPlans::local().get(false, f.grid);
  for (std::int64_t i = 0; i < entry.stotal; ++i) {
    entry.spec[i][0] = f.c[static_cast<std::size_t>(i)].real();
    entry.spec[i][1] = f.c[static_cast<std::size_t>(i)].imag();
  }
  fftw_execute(entry.plan);
  RealField out(f.grid);
  std::copy(entry.real, entry.real + entry.rtotal, out.s.begin());
  return out;
}

// Evaluate a spectral field on an enlarged grid with M points per axis
// (frequency-preserving zero-padded embedding followed by an inverse
// transform). Every nonzero coefficient must fit within the target band.
inline RealField physical_on_grid(const SpectralField& f, int M) {
  GridSpec tg{f.grid.dim, M, f.grid.L};
  tg.validate();
  auto& entry = detail::FftPlans::local().get(false, tg);
  std::memset(entry.spec, 0, sizeof(fftw_complex) * static_cast<std::size_t>(entry.stotal));
  const int Mh = M / 2 + 1, maxf = M / 2 - 1;
  const int dim = f.grid.dim;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const cplx v = f.c[static_cast<std::size_t>(idx)];
    if (v == cplx{0.0, 0.0}) return;
    for (int a = 0; a < dim; ++a)
      if (std::abs(xi[a]) > maxf)
        throw std::invalid_argument("physical_on_grid: target grid too small for content");
    std::int64_t t = 0;
    switch (dim) {
      case 1: t = xi[0]; break;
      case 2: t = static_cast<std::int64_t>(index_of_freq(xi[0], M)) * Mh + xi[1]; break;
      default:
        t = (static_cast<std::int64_t>(index_of_freq(xi[0], M)) * M + index_of_freq(xi[1], M)) * Mh + xi[2];
    }
    entry.spec[t][0] = v.real();
    entry.spec[t][1] = v.imag();
  });
  fftw_execute(entry.plan);
  RealField out(tg);
  std::copy(entry.real, entry.real + entry.rtotal, out.s.begin());
  return out;
}

// Evaluate a spectral field on a grid with independently chosen per-axis
// sizes (each even and large enough for that axis' content).  Used where the
// resolution requirement is direction-dependent: transverse slice norms need
// a fine cross-section but only a coarse slicing axis, and vice versa.
// Returns row-major samples; dims entries beyond the rank are ignored.
inline std::vector<double> physical_on_dims(const SpectralField& f, std::array<int, 3> dims) {
  const int dim = f.grid.dim;
  for (int a = dim; a < 3; ++a) dims[a] = 1;
  for (int a = 0; a < dim; ++a)
    if (dims[a] < 8 || dims[a] % 2 != 0)
      throw std::invalid_argument("physical_on_dims: axis sizes must be even and >= 8");
  auto& entry = detail::FftPlans::local().get(false, dim, dims);
  std::memset(entry.spec, 0, sizeof(fftw_complex) * static_cast<std::size_t>(entry.stotal));
  const int Mh = dims[dim - 1] / 2 + 1;
  for_each_mode(f.grid, [&](std::int64_t idx, const std::array<int, 3>& xi, double) {
    const cplx v = f.c[static_cast<std::size_t>(idx)];
    if (v == cplx{0.0, 0.0}) return;
    for (int a = 0; a < dim; ++a)
      if (std::abs(xi[a]) > dims[a] / 2 - 1)
        throw std::invalid_argument("physical_on_dims: target grid too small for content");
    std::int64_t t = 0;
    switch (dim) {
      case 1: t = xi[0]; break;
      case 2: t = static_cast<std::int64_t>(index_of_freq(xi[0], dims[0])) * Mh + xi[1]; break;
      default:
        t = (static_cast<std::int64_t>(index_of_freq(xi[0], dims[0])) * dims[1] +
             index_of_freq(xi[1], dims[1])) * Mh + xi[2];
    }
    entry.spec[t][0] = v.real();
    entry.spec[t][1] = v.imag();
  });
  fftw_execute(entry.plan);
  return std::vector<double>(entry.real, entry.real + entry.rtotal);
}

// Hermitian consistency of the stored last-frequency-zero plane plus
// realness of the mean; returns the largest absolute defect found.
inline double hermitian_defect(const SpectralField& f) {
  double worst = std::abs(f.c[0].imag());
  for_each_mode(f.grid, [&](std::int64_t, const std::array<int, 3>& xi, double w) {
    if (w != 1.0 || f.grid.dim == 1) return;  // only the shared plane can disagree
    std::array<int, 3> m{-xi[0], -xi[1], -xi[2]};
    const cplx a = f.at(xi), b = f.at(m);
    worst = std::max(worst, std::abs(a - std::conj(b)));
  });
  return worst;
}

// smallest even number >= n whose prime factors are all in {2,3,5,7}
inline int next_fast_even(int n) {
  if (n < 8) n = 8;
  if (n % 2) ++n;
  for (;; n += 2) {
    int m = n;
    for (int p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

}  // namespace nullform
