#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "saddlestat/errors.hpp"

namespace saddlestat {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse standard normal cdf; rational initial guess polished by Newton.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p outside (0,1)");
  // Beasley-Springer-Moro style central/tail split
  double x;
  if (p < 0.02425 || p > 1.0 - 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(std::min(p, 1.0 - p)));
    x = (((((-7.784894002430293e-03 * q - 3.223964580411365e-01) * q -
            2.400758277161838e+00) * q - 2.549732539343734e+00) * q +
          4.374664141464968e+00) * q + 2.938163982698783e+00) /
        ((((7.784695709041462e-03 * q + 3.224671290700398e-01) * q +
           2.445134137142996e+00) * q + 3.754408661907416e+00) * q + 1.0);
    if (p > 0.5) x = -x;  // rational form covers the lower tail
  } else {
    const double q = p - 0.5, r = q * q;
    x = (((((-3.969683028665376e+01 * r + 2.209460984245205e+02) * r -
            2.759285104469687e+02) * r + 1.383577518672690e+02) * r -
          3.066479806614716e+01) * r + 2.506628277459239e+00) * q /
        (((((-5.447609879822406e+01 * r + 1.615858368580409e+02) * r -
            1.556989798598866e+02) * r + 6.680131188771972e+01) * r -
          1.328068155288572e+01) * r + 1.0);
  }
  for (int it = 0; it < 3; ++it) {
    const double e = normal_cdf(x) - p;
    const double d = normal_pdf(x);
    if (d <= 0.0) break;
    x -= e / d;
  }
  return x;
}

// Two-sided z threshold at the significance of |z| <= 3, Bonferroni-widened
// when a check aggregates more than 10 comparisons.
inline double z_threshold(int n_comparisons) {
  if (n_comparisons <= 10) return 3.0;
  const double alpha3 = 2.0 * normal_cdf(-3.0);
  const double alpha = alpha3 * 10.0 / static_cast<double>(n_comparisons);
  return -normal_quantile(alpha / 2.0);
}

// Streaming mean/variance with exact block merging (Chan et al.).
struct MomentAccumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const MomentAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) { *this = o; return; }
    const double d = o.mean - mean;
    const double nn = static_cast<double>(n + o.n);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / nn;
    mean += d * static_cast<double>(o.n) / nn;
    n += o.n;
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double sd() const { return std::sqrt(variance()); }
  double stderr_mean() const {
    return n > 1 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0;
  }
};

// Two-sample Kolmogorov-Smirnov statistic; inputs need not be sorted.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) throw DomainError("ks_statistic: empty sample");
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < na && j < nb) {
    const double v = std::min(a[i], b[j]);
    while (i < na && a[i] == v) ++i;  // step past ties before comparing cdfs
    while (j < nb && b[j] == v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(na);
    const double fb = static_cast<double>(j) / static_cast<double>(nb);
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

// Critical value for the two-sample KS test, asymptotic form c(alpha) *
// sqrt((na+nb)/(na*nb)); c(0.01) = 1.628, c(0.05) = 1.358.
inline double ks_critical(std::size_t na, std::size_t nb, double alpha) {
  double c;
  if (alpha <= 0.01) c = 1.628;
  else if (alpha <= 0.05) c = 1.358;
  else c = 1.224;
  const double m = static_cast<double>(na), n = static_cast<double>(nb);
  return c * std::sqrt((m + n) / (m * n));
}

// log(sum_i exp(x_i)) without overflow; -inf for an empty or all -inf set.
inline double logsumexp(const std::vector<double>& x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

inline double logaddexp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log erfc(x) for x >= 0, finite far past the erfc underflow point.
inline double log_erfc_positive(double x) {
  if (x < 100.0) return static_cast<double>(logl(erfcl(static_cast<long double>(x))));
  // erfc(x) ~ e^{-x^2}/(x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4))
  const double x2 = x * x;
  return -x2 - std::log(x) - 0.5 * std::log(M_PI) +
         std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}

// Share of an integral allowed in the outermost populated bins; beyond this
// the sampled support has truncated a slowly decaying tail.
inline constexpr double kBoundaryShareTol = 0.25;
inline constexpr double kTailExtrapolationTol = 0.10;

struct WindowCoverage {
  int first = -1, last = -1;  // populated bin range
  double lo_share = 0.0, hi_share = 0.0;
};

// Quality gate for an integral accumulated over sampled bins. `contrib`
// holds per-bin log contributions (-inf where unpopulated) and `log_total`
// their logsumexp. The integrand must peak strictly inside the populated
// range, the outermost bins must carry a small share, and a geometric
// extrapolation of each unsampled tail must stay below a tenth of the total.
inline WindowCoverage check_window_coverage(const std::vector<double>& contrib,
                                            double log_total,
                                            const std::string& what) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const int nb = static_cast<int>(contrib.size());
  int jb = -1, jt = -1, jmax = -1;
  double cmax = neg_inf;
  for (int i = 0; i < nb; ++i) {
    if (contrib[static_cast<std::size_t>(i)] == neg_inf) continue;
    if (jb < 0) jb = i;
    jt = i;
    if (contrib[static_cast<std::size_t>(i)] > cmax) {
      cmax = contrib[static_cast<std::size_t>(i)];
      jmax = i;
    }
  }
  if (jb < 0 || log_total == neg_inf)
    throw CoverageError(what + ": integrand has no overlap with the sampled support");

  // A maximum at the boundary of the populated range means the true peak
  // lies in an unsampled region.
  if (jt - jb < 4 || jmax <= jb + 1 || jmax >= jt - 1)
    throw CoverageError(
        what + ": integrand peaks at the boundary of the sampled support "
        "(populated bins [" + std::to_string(jb) + ", " + std::to_string(jt) +
        "], peak at " + std::to_string(jmax) + ")");

  const double lo_share = std::exp(
      logaddexp(contrib[static_cast<std::size_t>(jb)],
                contrib[static_cast<std::size_t>(jb) + 1]) -
      log_total);
  const double hi_share = std::exp(
      logaddexp(contrib[static_cast<std::size_t>(jt)],
                contrib[static_cast<std::size_t>(jt) - 1]) -
      log_total);
  if (std::max(lo_share, hi_share) > kBoundaryShareTol)
    throw CoverageError(
        what + ": outermost populated bins carry share " +
        std::to_string(std::max(lo_share, hi_share)) +
        " of the integral; a slowly decaying tail was truncated");

  // Geometric extrapolation of the outermost populated bins bounds the part
  // of the integrand the samples never reached.
  const auto tail_beyond = [&](int end, int dir) {
    int found = 0, i0 = end;
    for (int i = end; i >= 0 && i < nb && found < 5; i -= dir) {
      if (contrib[static_cast<std::size_t>(i)] != neg_inf) {
        i0 = i;
        ++found;
      }
    }
    const int span = dir * (end - i0);
    if (span < 1) return 1.0;
    const double lr = (contrib[static_cast<std::size_t>(end)] -
                       contrib[static_cast<std::size_t>(i0)]) /
                      span;
    if (lr > -1e-3) return 1.0;  // flat or rising: no usable bound
    return std::exp(contrib[static_cast<std::size_t>(end)] + lr -
                    std::log1p(-std::exp(lr)) - log_total);
  };
  const double hi_tail = tail_beyond(jt, +1);
  const double lo_tail = tail_beyond(jb, -1);
  if (std::max(hi_tail, lo_tail) > kTailExtrapolationTol)
    throw CoverageError(
        what + ": extrapolated unsampled tail is " +
        std::to_string(std::max(hi_tail, lo_tail)) +
        " of the integral; more samples or a wider window are needed");

  WindowCoverage wc;
  wc.first = jb;
  wc.last = jt;
  wc.lo_share = lo_share;
  wc.hi_share = hi_share;
  return wc;
}

// log of int_a^b exp(-(t-mu)^2/2) dt, stable for windows far into either tail.
inline double log_gaussian_mass(double a, double b, double mu) {
  if (!(a < b)) throw DomainError("log_gaussian_mass: requires a < b");
  double x1 = a - mu, x2 = b - mu;
  if (x1 + x2 < 0.0) {  // mirror onto the right half line
    const double t = x1;
    x1 = -x2;
    x2 = -t;
  }
  const double kLogRootHalfPi = 0.5 * std::log(M_PI / 2.0);
  const double r2 = std::sqrt(0.5);
  if (x1 <= 0.0) {
    const long double d = erfl(static_cast<long double>(x2) * r2) -
                          erfl(static_cast<long double>(x1) * r2);
    return kLogRootHalfPi + static_cast<double>(logl(d));
  }
  const double la = log_erfc_positive(x1 * r2);
  const double lb = log_erfc_positive(x2 * r2);
  return kLogRootHalfPi + la + std::log1p(-std::exp(lb - la));
}

}  // namespace saddlestat
