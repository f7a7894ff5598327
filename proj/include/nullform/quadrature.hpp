// SPDX-License-Identifier: MIT
#pragma once
// Gauss-Legendre rules and the composite time quadrature used for all
// space-time norms. Integrands in t are trigonometric polynomials whose
// maximum angular frequency Omega is known in advance, so a composite rule
// with >= 4*Omega/pi total nodes (about ten nodes per fastest period)
// integrates them to machine accuracy; every consumer still performs a
// node-doubling self check.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nullform {

// nodes and weights of the m-point Gauss-Legendre rule on [-1, 1],
// by Newton iteration on the Legendre polynomial (cached per m)
inline const std::vector<std::pair<double, double>>& gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  thread_local std::map<int, std::vector<std::pair<double, double>>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;

  constexpr double eps = 1e-15;
  constexpr double pi = 3.14159265358979323846;
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(m));
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(pi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    rule[static_cast<std::size_t>(i)] = {-z, 2.0 / ((1.0 - z * z) * pp * pp)};
    rule[static_cast<std::size_t>(m - 1 - i)] = {z, rule[static_cast<std::size_t>(i)].second};
  }
  return cache.emplace(m, std::move(rule)).first->second;
}

// composite rule: `panels` equal panels of an m-point rule on [a, b]
inline std::vector<std::pair<double, double>> composite_gl(double a, double b, int panels, int m) {
  if (panels < 1) throw std::invalid_argument("composite_gl: need at least one panel");
  const auto& base = gauss_legendre(m);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels) * base.size());
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (const auto& [x, w] : base) out.emplace_back(lo + 0.5 * h * (x + 1.0), 0.5 * h * w);
  }
  return out;
}

// Raised when doubling the quadrature resolution moves a reported value by
// more than the advertised tolerance; carries both values for the report.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double coarse, double fine)
      : std::runtime_error(what + " (coarse " + std::to_string(coarse) + ", refined " +
                           std::to_string(fine) + ")"),
        coarse_(coarse),
        fine_(fine) {}
  double coarse() const { return coarse_; }
  double fine() const { return fine_; }

 private:
  double coarse_;
  double fine_;
};

struct TimeQuadrature {
  int panels = 1;
  int nodes_per_panel = 16;
  double max_time_frequency = 0.0;  // Omega, radians per unit time

  int total_nodes() const { return panels * nodes_per_panel; }
  std::vector<std::pair<double, double>> nodes() const {
    return composite_gl(0.0, 1.0, panels, nodes_per_panel);
  }
  TimeQuadrature refined() const { return {2 * panels, nodes_per_panel, max_time_frequency}; }
};

// rule over [0, 1] sized for integrands of time bandwidth omega
inline TimeQuadrature make_time_quadrature(double omega, int nodes_per_panel = 16) {
  if (omega < 0.0) throw std::invalid_argument("make_time_quadrature: negative bandwidth");
  constexpr double pi = 3.14159265358979323846;
  const double need = 4.0 * omega / pi;
  const int panels = std::max(1, static_cast<int>(std::ceil(need / nodes_per_panel)));
  TimeQuadrature tq{panels, nodes_per_panel, omega};
  if (tq.total_nodes() < need) throw std::logic_error("make_time_quadrature: node budget underflow");
  return tq;
}

}  // namespace nullform
