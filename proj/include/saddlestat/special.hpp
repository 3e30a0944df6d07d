#pragma once

// Airy kernels, the soft-edge one-point density, and the semicircle
// cdf/quantile pair. Scalar-templated entry points evaluate internally in
// long double: the Maclaurin branch is alternating and needs the extra
// mantissa near the crossover, and tests difference the long double values.

#include <cmath>

#include "saddlestat/errors.hpp"

namespace saddlestat {
namespace special {

namespace detail {

inline constexpr long double kAi0 = 0.355028053887817239260063186004L;
inline constexpr long double kAip0 = -0.258819403792806798405183560189L;
// series on [-8, 6], asymptotics outside; see the accuracy notes in the tests
inline constexpr double kSeriesLo = -8.0;
inline constexpr double kSeriesHi = 6.0;

struct AiPair {
  long double ai;
  long double aip;
};

// Maclaurin sums for Ai, Ai' built from the f/g basis term recurrences.
inline AiPair airy_series(long double x) {
  const long double x3 = x * x * x;
  long double tf = 1.0L, tg = x;            // terms of f, g
  long double tfp = 0.5L * x * x, tgp = 1.0L;  // terms of f', g'
  long double f = tf, g = tg, fp = 0.0L, gp = tgp;  // f' has no k=0 term
  for (int k = 1; k < 400; ++k) {
    tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
    tgp *= x3 / ((3.0L * k - 2.0L) * (3.0L * k));
    if (k > 1) tfp *= x3 / ((3.0L * k - 1.0L) * (3.0L * k - 3.0L));
    f += tf;
    g += tg;
    fp += tfp;
    gp += tgp;
    const long double scale = std::fabs(f) + std::fabs(g) + 1.0L;
    if (std::fabs(tf) < 1e-24L * scale && std::fabs(tg) < 1e-24L * scale &&
        std::fabs(tfp) < 1e-24L * scale && std::fabs(tgp) < 1e-24L * scale)
      break;
  }
  return {kAi0 * f + kAip0 * g, kAi0 * fp + kAip0 * gp};
}

// Poincare expansions for x > kSeriesHi; truncated at the smallest term.
inline AiPair airy_asymptotic_pos(long double x) {
  const long double zeta = (2.0L / 3.0L) * x * std::sqrt(x);
  long double u = 1.0L, su = 1.0L, sv = 1.0L;
  long double sign = 1.0L, prev = 1.0L;
  for (int k = 1; k < 200; ++k) {
    u *= (6.0L * k - 1.0L) * (6.0L * k - 5.0L) / (72.0L * k);
    const long double term = u / std::pow(zeta, static_cast<long double>(k));
    if (term > prev) break;  // divergent tail reached
    prev = term;
    sign = -sign;
    const long double v = u * (6.0L * k + 1.0L) / (1.0L - 6.0L * k);
    su += sign * term;
    sv += sign * (v / u) * term;
    if (term < 1e-25L) break;
  }
  const long double pref = std::exp(-zeta) / (2.0L * std::sqrt(M_PIl));
  const long double x4 = std::sqrt(std::sqrt(x));
  return {pref / x4 * su, -pref * x4 * sv};
}

// Oscillatory expansions for x < kSeriesLo (z = -x).
inline AiPair airy_asymptotic_neg(long double x) {
  const long double z = -x;
  const long double zeta = (2.0L / 3.0L) * z * std::sqrt(z);
  const long double c = std::cos(zeta - 0.25L * M_PIl);
  const long double s = std::sin(zeta - 0.25L * M_PIl);
  // split Sum (-1)^k u_k zeta^{-k} into even/odd parts (same for v_k)
  long double ue = 1.0L, uo = 0.0L, ve = 1.0L, vo = 0.0L;
  long double u = 1.0L, prev = 1e30L;
  long double zp = 1.0L;  // zeta^{-k}
  for (int k = 1; k < 200; ++k) {
    u *= (6.0L * k - 1.0L) * (6.0L * k - 5.0L) / (72.0L * k);
    zp /= zeta;
    const long double term = u * zp;
    if (term > prev) break;
    prev = term;
    const long double vterm = term * (6.0L * k + 1.0L) / (1.0L - 6.0L * k);
    // (-1)^k factor with k = 2j on evens, k = 2j+1 on odds collapses to
    // alternation within each sub-series
    const long double alt = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      ue += alt * term;
      ve += alt * vterm;
    } else {
      uo += alt * term;
      vo += alt * vterm;
    }
    if (term < 1e-25L) break;
  }
  const long double rpi = 1.0L / std::sqrt(M_PIl);
  const long double z4 = std::sqrt(std::sqrt(z));
  return {rpi / z4 * (c * ue + s * uo), rpi * z4 * (s * ve - c * vo)};
}

inline AiPair airy_pair(long double x) {
  if (x > kSeriesHi) return airy_asymptotic_pos(x);
  if (x < kSeriesLo) return airy_asymptotic_neg(x);
  return airy_series(x);
}

}  // namespace detail

template <typename Scalar>
Scalar airy_ai(Scalar x) {
  if (!std::isfinite(static_cast<double>(x)))
    throw DomainError("airy_ai: non-finite argument");
  return static_cast<Scalar>(detail::airy_pair(static_cast<long double>(x)).ai);
}

template <typename Scalar>
Scalar airy_ai_prime(Scalar x) {
  if (!std::isfinite(static_cast<double>(x)))
    throw DomainError("airy_ai_prime: non-finite argument");
  return static_cast<Scalar>(detail::airy_pair(static_cast<long double>(x)).aip);
}

// Int_x^inf Ai(t) dt; cached cubic-Hermite table on [-45, 15], direct
// quadrature outside. airy_ai_tail_integral_direct is the uncached path.
double airy_ai_tail_integral(double x);
double airy_ai_tail_integral_direct(double x);

// One-point density of the soft-edge rescaled GOE spectrum,
// rho_edge = Ai'^2 - x Ai^2 + Ai (1 - Int_x^inf Ai) / 2.
double rho_edge(double lambda);

// Semicircle density on [-1, 1], normalized to 1.
double rho_sc(double lambda);

// t(lambda): fraction of the semicircle spectrum above lambda; decreasing,
// t(-1) = 1, t(1) = 0.
double semicircle_cdf(double lambda);

// Q_x: inverse of semicircle_cdf, |t(Q_x) - x| <= 1e-12.
double semicircle_quantile(double x);

double log_gamma(double x);

}  // namespace special
}  // namespace saddlestat
