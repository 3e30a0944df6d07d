#include "saddlestat/constrained.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "saddlestat/errors.hpp"
#include "saddlestat/quadrature.hpp"
#include "saddlestat/special.hpp"
#include "saddlestat/stats.hpp"

namespace saddlestat {
namespace constrained {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_q(double q, const char* who) {
  if (!(q > 1.0) || !std::isfinite(q))
    throw DomainError(std::string(who) + ": q must be > 1");
}

void require_m(double m, const char* who) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw DomainError(std::string(who) + ": m must be > 0");
}

}  // namespace

SaddlePoint saddle_points(double m, double eps0, double q) {
  require_m(m, "saddle_points");
  if (!std::isfinite(eps0)) throw DomainError("saddle_points: eps0 not finite");
  if (!(q > 0.0)) throw DomainError("saddle_points: q must be > 0");
  const double u = q * (m * q - eps0);
  SaddlePoint sp;
  sp.delta = std::sqrt(2.0 * (1.0 + q * q) + u * u);
  sp.s = (sp.delta + u) / (std::sqrt(2.0) * (1.0 + q * q));
  sp.r = std::sqrt(sp.delta - u) / std::sqrt(m);
  return sp;
}

double f_joint(double s, double r, double m, double eps0, double q) {
  require_m(m, "f_joint");
  require_q(q, "f_joint");
  if (!(r > 0.0)) throw DomainError("f_joint: r must be > 0");
  const double f = landscape::f_exponent(s, m);
  const double g = 0.5 * m * m * r * r - std::log(r);
  const double a =
      std::sqrt(2.0) * s - m + q * eps0 - 0.5 * m * r * r;
  return f + g + a * a / (2.0 * (q * q - 1.0));
}

double m_c(double eps0, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("m_c: q must be > 0");
  return 1.0 + (1.0 + 2.0 * q * eps0) / (2.0 * q * q);
}

double eps_threshold(double q) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw DomainError("eps_threshold: q must be > 0");
  return -(1.0 + 2.0 * q * q) / (2.0 * q);
}

double sigma_eq_below_mc(double m, double eps0, double q) {
  require_m(m, "sigma_eq_below_mc");
  require_q(q, "sigma_eq_below_mc");
  const SaddlePoint sp = saddle_points(m, eps0, q);
  return -f_joint(sp.s, sp.r, m, eps0, q);
}

namespace {

// Spectral deformation cost for a level forced past the bulk edge.
double phi_deform(double s) {
  const double t = std::sqrt(std::max(0.0, s * s - 2.0));
  return 0.5 * s * t - std::log((s + t) / std::sqrt(2.0));
}

}  // namespace

double sigma_eq_above_mc(double m, double eps0, double q) {
  require_m(m, "sigma_eq_above_mc");
  require_q(q, "sigma_eq_above_mc");
  const double w = m * q - eps0;
  // The deformed saddle satisfies s >= sqrt(2) on both sides of m_c, so the
  // wrong-side check must compare m with m_c directly.
  if (!(w * w >= 2.0) || m <= m_c(eps0, q))
    throw BranchError(
        "sigma_eq_above_mc: m at or below m_c, the level is reachable "
        "without deforming the spectrum; use the below-m_c branch");
  const double rt = std::sqrt(w * w - 2.0);
  const double q2 = q * q;
  const double s =
      (w * (1.0 + 2.0 * q2) + (1.0 - 2.0 * q2) * rt) /
      (2.0 * std::sqrt(2.0) * q);
  const double r = std::sqrt(q / m) * std::sqrt(w - rt);
  return -f_joint(s, r, m, eps0, q) - phi_deform(s);
}

double sigma_eq_constrained(double m, double eps0, double q) {
  require_m(m, "sigma_eq_constrained");
  require_q(q, "sigma_eq_constrained");
  return m <= m_c(eps0, q) ? sigma_eq_below_mc(m, eps0, q)
                           : sigma_eq_above_mc(m, eps0, q);
}

namespace {

// Golden-section maximizer for a smooth unimodal bracket.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double a, double b, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double flo) {
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PhaseDiagram phase_curves(double q, const std::vector<double>& m_grid) {
  require_q(q, "phase_curves");
  if (m_grid.empty()) throw DomainError("phase_curves: empty grid");
  for (double m : m_grid)
    if (!(m > 0.0 && m <= 1.0))
      throw DomainError("phase_curves: grid values must lie in (0, 1]");

  PhaseDiagram pd;
  pd.q = q;
  pd.m_grid = m_grid;
  pd.line_level = -1.0 / (2.0 * q);
  pd.critical_point = {1.0, pd.line_level};
  pd.threshold = eps_threshold(q);
  pd.toppling_boundary_slope = q;

  const double lo0 = pd.threshold;
  for (double m : m_grid) {
    const std::function<double(double)> sig = [m, q](double e) {
      return sigma_eq_below_mc(m, e, q);
    };
    // The lower curve and the maximizer stay below zero; scan them on a
    // fine linear grid. The upper curve escapes to large levels as m -> 0
    // (the exponent decays only logarithmically in m there), so the top of
    // the region is found by geometric growth instead.
    const double step = 1e-3;
    const int nsteps = static_cast<int>(std::ceil(-lo0 / step));
    std::vector<double> grid(static_cast<std::size_t>(nsteps) + 1);
    std::vector<double> val(grid.size());
    int imax = 0;
    double smax = kNegInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = std::min(lo0 + step * static_cast<double>(i), 0.0);
      val[i] = sig(grid[i]);
      if (val[i] > smax) {
        smax = val[i];
        imax = static_cast<int>(i);
      }
    }
    double hi = 0.0;
    if (val.back() > 0.0) {
      hi = 0.5;
      while (sig(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e7)
          throw RootFindError(
              "phase_curves: exponent still positive at eps0 = 1e7 for m = " +
              std::to_string(m));
      }
    }
    if (smax <= 0.0) {
      const double ga = grid[static_cast<std::size_t>(std::max(imax - 1, 0))];
      const double gb = grid[static_cast<std::size_t>(
          std::min<int>(imax + 1, static_cast<int>(grid.size()) - 1))];
      const auto [epeak, speak] = golden_max(sig, ga, gb, 1e-11);
      if (std::fabs(speak) <= 1e-9) {  // grazing contact at the critical point
        pd.eps_minus.push_back(epeak);
        pd.eps_plus.push_back(epeak);
        continue;
      }
      throw RootFindError(
          "phase_curves: no positive complexity at m = " + std::to_string(m) +
          "; scanned eps0 in [" + std::to_string(lo0) + ", " +
          std::to_string(std::max(hi, 0.0)) + "], max " +
          std::to_string(speak) + " at " + std::to_string(epeak));
    }
    int ja = imax;
    while (ja > 0 && val[static_cast<std::size_t>(ja)] > 0.0) --ja;
    if (val[static_cast<std::size_t>(ja)] > 0.0) {
      // At very small m the log-divergent entropy keeps the exponent positive
      // past the threshold level; the lower curve continues below it, drifting
      // down only like sqrt(log(1/m)). Extend the bracket geometrically.
      double pos = lo0, off = 0.5;
      while (sig(lo0 - off) > 0.0) {
        pos = lo0 - off;
        off *= 2.0;
        if (off > 1e7)
          throw RootFindError(
              "phase_curves: lower boundary not bracketed for m = " +
              std::to_string(m));
      }
      pd.eps_minus.push_back(bisect_root(sig, lo0 - off, pos, sig(lo0 - off)));
    } else {
      pd.eps_minus.push_back(
          bisect_root(sig, grid[static_cast<std::size_t>(ja)],
                      grid[static_cast<std::size_t>(ja) + 1],
                      val[static_cast<std::size_t>(ja)]));
    }
    if (hi > 0.0) {
      pd.eps_plus.push_back(bisect_root(sig, 0.0, hi, val.back()));
    } else {
      int jb = imax;
      while (jb + 1 < static_cast<int>(val.size()) &&
             val[static_cast<std::size_t>(jb)] > 0.0)
        ++jb;
      pd.eps_plus.push_back(
          bisect_root(sig, grid[static_cast<std::size_t>(jb) - 1],
                      grid[static_cast<std::size_t>(jb)],
                      val[static_cast<std::size_t>(jb) - 1]));
    }
  }
  return pd;
}

double toppling_drift(double delta, double eps, double q) {
  require_q(q, "toppling_drift");
  if (!std::isfinite(delta) || !std::isfinite(eps))
    throw DomainError("toppling_drift: delta and eps must be finite");
  const double q2 = q * q;
  return 2.0 * std::sqrt(2.0) * q * (q * delta - eps) /
         std::sqrt((2.0 * q2 - 1.0) * (2.0 * q2 + 3.0));
}

double toppling_drift_alt(double delta, double eps, double q) {
  require_q(q, "toppling_drift_alt");
  const double q2 = q * q;
  return 2.0 * std::sqrt(2.0) * q * (q * delta - eps) /
         std::sqrt((2.0 * q2 - 1.0) * (q2 + 2.0));
}

double toppling_scale(double q) {
  require_q(q, "toppling_scale");
  const double q2 = q * q;
  return std::sqrt((2.0 * q2 + 3.0) / (2.0 * q2 - 1.0)) * std::sqrt(2.0) *
         landscape::toppling_constant();
}

namespace {

// Integral of sqrt(sigma) e^{-sigma^2/2 - drift sigma} under sigma = u^2,
// with the exponent shifted per sign of the drift so neither branch
// underflows; both cdf factors share one shift, so ratios are exact.
double crossover_partial(double drift, double u_hi) {
  if (drift >= 0.0) {
    return 2.0 * integrate_adaptive(
                     [drift](double u) {
                       const double u2 = u * u;
                       return u2 * std::exp(-drift * u2 - 0.5 * u2 * u2);
                     },
                     0.0, u_hi, 1e-12);
  }
  return 2.0 * integrate_adaptive(
                   [drift](double u) {
                     const double t = u * u + drift;
                     return u * u * std::exp(-0.5 * t * t);
                   },
                   0.0, u_hi, 1e-12);
}

double crossover_u_inf(double drift) {
  return std::sqrt(std::max(0.0, -drift) + 16.0);
}

}  // namespace

double toppling_cdf_constrained(double delta, double eps, double q,
                                double kappa) {
  require_q(q, "toppling_cdf_constrained");
  if (!(kappa >= 0.0))
    throw DomainError("toppling_cdf_constrained: kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  const double drift = toppling_drift(delta, eps, q);
  const double ui = crossover_u_inf(drift);
  const double us =
      std::min(std::sqrt(toppling_scale(q)) * std::cbrt(kappa), ui);
  return crossover_partial(drift, us) / crossover_partial(drift, ui);
}

double toppling_density_constrained(double delta, double eps, double q,
                                    double kappa) {
  require_q(q, "toppling_density_constrained");
  if (!(kappa >= 0.0))
    throw DomainError("toppling_density_constrained: kappa must be >= 0");
  const double drift = toppling_drift(delta, eps, q);
  const double c2 = toppling_scale(q);
  const double z = crossover_partial(drift, crossover_u_inf(drift));
  const double sigma = c2 * std::cbrt(kappa * kappa);
  // sqrt(sigma) kappa^{-1/3} -> sqrt(c2) as kappa -> 0
  const double amp = (2.0 / 3.0) * c2 *
                     (kappa == 0.0 ? std::sqrt(c2)
                                   : std::sqrt(sigma) / std::cbrt(kappa));
  const double shifted =
      drift >= 0.0 ? -0.5 * sigma * sigma - drift * sigma
                   : -0.5 * (sigma + drift) * (sigma + drift);
  return amp * std::exp(shifted) / z;
}

double kappa_max_constrained(double delta, double eps, double q) {
  require_q(q, "kappa_max_constrained");
  const double drift = toppling_drift(delta, eps, q);
  if (drift >= 0.0) return 0.0;
  return std::pow(-drift / toppling_scale(q), 1.5);
}

IndexDistribution toppling_distribution_constrained(double delta, double eps,
                                                    double q, double kappa_hi,
                                                    int npoints) {
  require_q(q, "toppling_distribution_constrained");
  if (!(kappa_hi > 0.0) || npoints < 2)
    throw DomainError("toppling_distribution_constrained: bad grid");
  IndexDistribution d;
  d.model = "constrained";
  d.regime = "toppling";
  d.kind = "continuous";
  d.value_kind = "density";
  d.scale_exponent = 0.25;
  d.params = {{"delta", delta}, {"eps", eps}, {"q", q}};
  for (int i = 0; i < npoints; ++i) {
    const double x = kappa_hi * static_cast<double>(i) /
                     static_cast<double>(npoints - 1);
    d.support.push_back(x);
    d.value.push_back(toppling_density_constrained(delta, eps, q, x));
  }
  d.normalized = true;
  return d;
}

double kappa_max_complexity_constrained(double m, double eps0, double q) {
  require_q(q, "kappa_max_complexity_constrained");
  if (!(m > 0.0 && m < m_c(eps0, q)))
    throw DomainError(
        "kappa_max_complexity_constrained: m outside (0, m_c)");
  const SaddlePoint sp = saddle_points(m, eps0, q);
  return special::semicircle_cdf(sp.s / std::sqrt(2.0));
}

double complexity_cdf_constrained(double m, double eps0, double q,
                                  double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("complexity_cdf_constrained: kappa outside [0, 1]");
  return kappa >= kappa_max_complexity_constrained(m, eps0, q) ? 1.0 : 0.0;
}

IndexDistribution complexity_distribution_constrained(double m, double eps0,
                                                      double q, int npoints) {
  if (npoints < 2)
    throw DomainError("complexity_distribution_constrained: bad grid");
  const double atom = kappa_max_complexity_constrained(m, eps0, q);
  IndexDistribution d;
  d.model = "constrained";
  d.regime = "complexity";
  d.kind = "continuous";
  d.value_kind = "cdf";
  d.scale_exponent = 1.0;
  d.params = {{"m", m}, {"eps0", eps0}, {"q", q}};
  for (int i = 0; i < npoints; ++i) {
    const double x = 0.5 * static_cast<double>(i) /
                     static_cast<double>(npoints - 1);
    d.support.push_back(x);
    d.value.push_back(x >= atom ? 1.0 : 0.0);
  }
  d.normalized = true;
  d.has_atom = true;
  d.atom_location = atom;
  d.atom_mass = 1.0;
  return d;
}

namespace {

// log of the R-direction factor Int dR/R e^{-n (g + h)} at fixed s.
double log_radial_integral(double s, double m, double eps0, double q, int n,
                           double y0) {
  const double nn = static_cast<double>(n);
  const double denom = 2.0 * (q * q - 1.0);
  const auto logf = [=](double y) {
    const double r2 = std::exp(2.0 * y);
    const double a = std::sqrt(2.0) * s - m + q * eps0 - 0.5 * m * r2;
    return -0.5 * nn * m * m * r2 + nn * y - nn * a * a / denom;
  };
  return log_integrate_expand(logf, y0 - 1.5, y0 + 1.5, 1e-12, 1e-10);
}

double log_weight_prefactor(double m, double q, int n) {
  const double nn = static_cast<double>(n);
  return 0.5 * std::log(2.0 * nn / M_PI) + std::log(q) -
         0.5 * std::log(q * q - 1.0) +
         0.5 * nn * std::log(0.5 * nn * m * m) - special::log_gamma(0.5 * nn);
}

}  // namespace

double log_energy_weight(double s, double m, double eps0, double q, int n) {
  require_m(m, "log_energy_weight");
  require_q(q, "log_energy_weight");
  if (n < 1) throw DomainError("log_energy_weight: n must be >= 1");
  if (!std::isfinite(s) || !std::isfinite(eps0))
    throw DomainError("log_energy_weight: non-finite argument");
  const double y0 = std::log(saddle_points(m, eps0, q).r);
  return log_weight_prefactor(m, q, n) +
         log_radial_integral(s, m, eps0, q, n, y0);
}

namespace {

// Exact per-level mean count from an empirical density. At fixed R the
// level weight is Gaussian in the eigenvalue coordinate, so the product
// with the window Gaussian keeps an exact per-bin mass under a rescaled
// center; only the R direction needs numerical integration.
landscape::MeanCount level_window_integral(const ConstrainedParams& p,
                                           const EmpiricalDensity& d) {
  require_m(p.m, "constrained mean count");
  require_q(p.q, "constrained mean count");
  if (p.n < 1) throw DomainError("constrained mean count: n must be >= 1");
  if (d.transform.kind != "identity")
    throw DomainError("constrained mean count: density must be raw-scale, not " +
                      d.transform.kind);
  if (d.matrix_n != p.n + 1)
    throw DomainError("constrained mean count: density is for matrix size " +
                      std::to_string(d.matrix_n) + ", expected n+1 = " +
                      std::to_string(p.n + 1));
  if (d.n_samples < 1) throw DomainError("constrained mean count: empty density");

  const double nn = static_cast<double>(p.n);
  const double q2 = p.q * p.q;
  const double mu = std::sqrt(2.0 * nn) * p.m;
  const double alpha = (q2 + 1.0) / (q2 - 1.0);
  const double ra = std::sqrt(alpha);
  const double y0 = std::log(saddle_points(p.m, p.eps0, p.q).r);

  const int nb = d.nbins();
  std::vector<double> contrib(static_cast<std::size_t>(nb), kNegInf);
  std::vector<double> se_terms;
  for (int i = 0; i < nb; ++i) {
    const double rho = d.density(i);
    const double se = d.stderr_density(i);
    if (rho <= 0.0 && se <= 0.0) continue;
    const double a = d.bin_left(i), b = d.bin_right(i);
    const auto logf = [&, a, b](double y) {
      const double r2 = std::exp(2.0 * y);
      const double nu =
          std::sqrt(0.5 * nn) * (p.m - p.q * p.eps0 + 0.5 * p.m * r2);
      const double xbar = (mu + 2.0 * nu / (q2 - 1.0)) / alpha;
      const double k = (mu - nu) * (mu - nu) / (q2 + 1.0);
      return -0.5 * nn * p.m * p.m * r2 + nn * y - k -
             0.5 * std::log(alpha) +
             log_gaussian_mass(ra * a, ra * b, ra * xbar);
    };
    const double logw =
        log_integrate_expand(logf, y0 - 1.5, y0 + 1.5, 1e-12, 1e-10);
    if (rho > 0.0) contrib[static_cast<std::size_t>(i)] = std::log(rho) + logw;
    if (se > 0.0) se_terms.push_back(2.0 * (std::log(se) + logw));
  }
  const double log_int = logsumexp(contrib);
  const WindowCoverage wc = check_window_coverage(
      contrib, log_int,
      "constrained mean count (level " + std::to_string(p.eps0) + ")");

  const double log_pref =
      std::log(2.0 / M_PI) + 0.5 * std::log(nn) + std::log(p.q) -
      0.5 * std::log(q2 - 1.0) + special::log_gamma(0.5 * (nn + 1.0)) -
      special::log_gamma(0.5 * nn) + 0.5 * nn * p.m * p.m;

  landscape::MeanCount out;
  out.log_value = log_pref + log_int;
  out.se_log = se_terms.empty()
                   ? 0.0
                   : std::exp(0.5 * logsumexp(se_terms) - log_int);
  out.coverage = 1.0 - wc.lo_share - wc.hi_share;
  out.source = "mc";
  return out;
}

}  // namespace

landscape::MeanCount mean_nk_exact_constrained(const ConstrainedParams& p,
                                               const EmpiricalDensity& density) {
  if (density.k < 0)
    throw DomainError(
        "mean_nk_exact_constrained: needs an order-statistic density (k >= 0)");
  if (density.k > p.n)
    throw DomainError("mean_nk_exact_constrained: k exceeds n");
  if (density.multiplicity != 1)
    throw DomainError(
        "mean_nk_exact_constrained: density must hold a single order statistic");
  return level_window_integral(p, density);
}

landscape::MeanCount mean_neq_exact_constrained(const ConstrainedParams& p,
                                                const EmpiricalDensity& density) {
  if (density.k != -1)
    throw DomainError(
        "mean_neq_exact_constrained: needs the stacked total density (k = -1)");
  if (density.multiplicity != density.matrix_n)
    throw DomainError(
        "mean_neq_exact_constrained: total density must stack all eigenvalues");
  return level_window_integral(p, density);
}

double line_decay_exponent(double eps0_c, double q) {
  require_q(q, "line_decay_exponent");
  const double mc = m_c(eps0_c, q);
  if (!(mc > 0.0))
    throw DomainError("line_decay_exponent: level at or below the threshold");
  const double om = 1.0 - mc;
  return -0.5 * std::log(mc) - 0.5 * om * (1.0 + q * q * om);
}

bool ratios_lose_interpretation(double eps0_c, double q) {
  return line_decay_exponent(eps0_c, q) < -1e-12;
}

}  // namespace constrained
}  // namespace saddlestat
