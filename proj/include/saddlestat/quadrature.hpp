#pragma once

// Gauss-Legendre panel quadrature, in plain and log space. Log-space panels
// (log-sum-exp over nodes) keep Laplace-type integrands with exponents of
// order N*f(s) finite well past the double overflow point.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "saddlestat/errors.hpp"
#include "saddlestat/stats.hpp"

namespace saddlestat {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Nodes by Newton iteration on P_n from the Chebyshev initial guess.
inline GaussLegendreRule make_gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order < 1");
  GaussLegendreRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::map<int, GaussLegendreRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

template <typename F>
double integrate_panels(F&& f, double a, double b, int panels, int order = 16) {
  const GaussLegendreRule& r = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double c = lo + 0.5 * h, s = 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      acc += r.weights[i] * f(c + s * r.nodes[i]);
    total += acc * s;
  }
  return total;
}

// Panel doubling until successive estimates agree to the requested tolerance.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                          double abs_tol = 0.0, int order = 16,
                          int max_doublings = 18, int initial_panels = 4) {
  double prev = integrate_panels(f, a, b, initial_panels, order);
  int panels = initial_panels;
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    const double cur = integrate_panels(f, a, b, panels, order);
    if (std::fabs(cur - prev) <=
        std::max(rel_tol * std::fabs(cur), abs_tol))
      return cur;
    prev = cur;
  }
  throw RootFindError("integrate_adaptive: no convergence after doubling");
}

// log of Int_a^b exp(logf(x)) dx over fixed panels.
template <typename F>
double log_integrate_panels(F&& logf, double a, double b, int panels,
                            int order = 16) {
  const GaussLegendreRule& r = gauss_legendre(order);
  const double h = (b - a) / panels;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(panels) * r.nodes.size());
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double c = lo + 0.5 * h, s = 0.5 * h;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double lf = logf(c + s * r.nodes[i]);
      if (lf == -std::numeric_limits<double>::infinity()) continue;
      terms.push_back(std::log(r.weights[i] * s) + lf);
    }
  }
  return logsumexp(terms);
}

template <typename F>
double log_integrate_adaptive(F&& logf, double a, double b,
                              double log_tol = 1e-10, int order = 16,
                              int max_doublings = 16, int initial_panels = 8) {
  double prev = log_integrate_panels(logf, a, b, initial_panels, order);
  int panels = initial_panels;
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    const double cur = log_integrate_panels(logf, a, b, panels, order);
    const bool both_ninf = !std::isfinite(cur) && !std::isfinite(prev);
    if (both_ninf || std::fabs(cur - prev) <= log_tol) return cur;
    prev = cur;
  }
  throw RootFindError("log_integrate_adaptive: no convergence after doubling");
}

// log of Int exp(logf) over a window grown symmetrically from [lo, hi] until
// the outermost panels contribute a fraction below edge_tol of the total.
template <typename F>
double log_integrate_expand(F&& logf, double lo, double hi,
                            double edge_tol = 1e-12, double log_tol = 1e-10,
                            int order = 16, int max_expand = 60) {
  double width = hi - lo;
  for (int e = 0; e < max_expand; ++e) {
    const double total = log_integrate_adaptive(logf, lo, hi, log_tol, order);
    const double left = log_integrate_panels(logf, lo, lo + 0.1 * width, 4, order);
    const double right = log_integrate_panels(logf, hi - 0.1 * width, hi, 4, order);
    const double cut = total + std::log(edge_tol);
    const bool grow_left = left > cut;
    const bool grow_right = right > cut;
    if (!grow_left && !grow_right) return total;
    if (grow_left) lo -= 0.5 * width;
    if (grow_right) hi += 0.5 * width;
    width = hi - lo;
  }
  throw RootFindError("log_integrate_expand: window kept growing");
}

}  // namespace saddlestat
