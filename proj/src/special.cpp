#include "saddlestat/special.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include "saddlestat/quadrature.hpp"

namespace saddlestat {
namespace special {

namespace {

constexpr double kTailUpper = 14.0;   // Ai tail beyond here is < 1e-16
constexpr double kGridLo = -45.0;
constexpr double kGridHi = 15.0;
constexpr int kGridPerUnit = 256;

// Int_x^inf Ai for x >= kTailUpper from the Poincare expansion,
// e^{-zeta} / (2 sqrt(pi) x^{3/4}) (1 - 41/48 zeta^{-1} + ...).
double tail_asymptotic(double x) {
  const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
  const double pref =
      std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(x, 0.75));
  return pref * (1.0 - 41.0 / (48.0 * zeta));
}

struct TailTable {
  std::vector<double> value;  // Int_{x_i}^inf Ai
  std::vector<double> deriv;  // -Ai(x_i)
  double lo = kGridLo;
  double h = 1.0 / kGridPerUnit;
  std::size_t n = 0;
};

// Cumulative table built right to left; each cell integrated by 8-point GL.
const TailTable& tail_table() {
  static TailTable t;
  static std::once_flag once;
  std::call_once(once, [] {
    t.n = static_cast<std::size_t>((kGridHi - kGridLo) * kGridPerUnit) + 1;
    t.value.resize(t.n);
    t.deriv.resize(t.n);
    const GaussLegendreRule& r = gauss_legendre(8);
    t.value[t.n - 1] = tail_asymptotic(kGridHi);
    t.deriv[t.n - 1] = -airy_ai(kGridHi);
    for (std::size_t i = t.n - 1; i-- > 0;) {
      const double a = t.lo + static_cast<double>(i) * t.h;
      const double c = a + 0.5 * t.h, s = 0.5 * t.h;
      double cell = 0.0;
      for (std::size_t j = 0; j < r.nodes.size(); ++j)
        cell += r.weights[j] * airy_ai(c + s * r.nodes[j]);
      t.value[i] = t.value[i + 1] + cell * s;
      t.deriv[i] = -airy_ai(a);
    }
  });
  return t;
}

}  // namespace

double airy_ai_tail_integral_direct(double x) {
  if (!std::isfinite(x)) throw DomainError("airy_ai_tail_integral: non-finite");
  if (x >= kTailUpper) return tail_asymptotic(x);
  const double body = integrate_adaptive([](double u) { return airy_ai(u); },
                                         x, kTailUpper, 1e-12, 1e-14, 16, 20,
                                         std::max(4, static_cast<int>(kTailUpper - x)));
  return body + tail_asymptotic(kTailUpper);
}

double airy_ai_tail_integral(double x) {
  if (!std::isfinite(x)) throw DomainError("airy_ai_tail_integral: non-finite");
  if (x >= kTailUpper) return tail_asymptotic(x);
  if (x < kGridLo) return airy_ai_tail_integral_direct(x);
  const TailTable& t = tail_table();
  const double u = (x - t.lo) / t.h;
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= t.n - 1) i = t.n - 2;
  // cubic Hermite on [x_i, x_{i+1}] with exact endpoint derivatives
  const double s = u - static_cast<double>(i);
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * t.value[i] + h10 * t.h * t.deriv[i] + h01 * t.value[i + 1] +
         h11 * t.h * t.deriv[i + 1];
}

double rho_edge(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("rho_edge: non-finite");
  const double ai = airy_ai(lambda);
  const double aip = airy_ai_prime(lambda);
  const double tail = airy_ai_tail_integral(lambda);
  return aip * aip - lambda * ai * ai + 0.5 * ai * (1.0 - tail);
}

double rho_sc(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("rho_sc: non-finite");
  const double t = 1.0 - lambda * lambda;
  return t > 0.0 ? (2.0 / M_PI) * std::sqrt(t) : 0.0;
}

double semicircle_cdf(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("semicircle_cdf: non-finite");
  if (lambda < -1.0 || lambda > 1.0)
    throw DomainError("semicircle_cdf: lambda outside [-1, 1]");
  return (std::acos(lambda) - lambda * std::sqrt(1.0 - lambda * lambda)) / M_PI;
}

double semicircle_quantile(double x) {
  if (!std::isfinite(x) || x < 0.0 || x > 1.0)
    throw DomainError("semicircle_quantile: x outside [0, 1]");
  if (x == 0.0) return 1.0;
  if (x == 1.0) return -1.0;
  // lambda = cos(theta): solve theta - sin(2 theta)/2 = pi x on (0, pi)
  const double target = M_PI * x;
  double lo = 0.0, hi = M_PI;
  double th = M_PI * x;  // monotone initial guess
  for (int it = 0; it < 200; ++it) {
    const double f = th - 0.5 * std::sin(2.0 * th) - target;
    if (f > 0.0) hi = th; else lo = th;
    const double d = 1.0 - std::cos(2.0 * th);
    double next = (d > 1e-12) ? th - f / d : 0.5 * (lo + hi);
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::fabs(next - th) < 1e-16 && std::fabs(f) < 1e-13) { th = next; break; }
    th = next;
  }
  return std::cos(th);
}

double log_gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw DomainError("log_gamma: argument must be finite and positive");
  return std::lgamma(x);
}

}  // namespace special
}  // namespace saddlestat
