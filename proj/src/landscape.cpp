#include "saddlestat/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "saddlestat/errors.hpp"
#include "saddlestat/quadrature.hpp"
#include "saddlestat/special.hpp"
#include "saddlestat/stats.hpp"

namespace saddlestat {
namespace landscape {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void validate(const RegimeSpec& spec) {
  if (spec.region == "simplicity") {
    if (!(spec.m > 1.0))
      throw DomainError("regime simplicity requires m > 1");
  } else if (spec.region == "hierarchy") {
    if (!(spec.delta > 0.0))
      throw DomainError("regime hierarchy requires delta > 0");
  } else if (spec.region == "toppling") {
    if (!std::isfinite(spec.delta))
      throw DomainError("regime toppling requires finite delta");
  } else if (spec.region == "complexity") {
    if (!(spec.m > 0.0 && spec.m < 1.0))
      throw DomainError("regime complexity requires 0 < m < 1");
  } else {
    throw DomainError("unknown regime: " + spec.region);
  }
}

double f_exponent(double s, double m) {
  if (!std::isfinite(s) || !std::isfinite(m))
    throw DomainError("f_exponent: non-finite argument");
  const double d = s - m / std::sqrt(2.0);
  return d * d - 0.5 * s * s;
}

double log_count_prefactor(const LandscapeParams& p) {
  if (!(p.m > 0.0) || !std::isfinite(p.m))
    throw DomainError("log_count_prefactor: m must be > 0");
  if (p.n < 1) throw DomainError("log_count_prefactor: n must be >= 1");
  const double n = static_cast<double>(p.n);
  return 0.5 * std::log(2.0 / M_PI) + 0.5 * n * std::log(2.0 / n) +
         special::log_gamma(0.5 * (n + 1.0)) - n * std::log(p.m) + 0.5 * n * p.m * p.m;
}

double window_center(const LandscapeParams& p) {
  if (!(p.m > 0.0) || p.n < 1) throw DomainError("window_center: bad parameters");
  return std::sqrt(2.0 * static_cast<double>(p.n)) * p.m;
}

namespace {

MeanCount window_integral(const LandscapeParams& p, const EmpiricalDensity& d) {
  if (d.transform.kind != "identity")
    throw DomainError("mean count: density must be raw-scale, not " +
                      d.transform.kind);
  if (d.matrix_n != p.n + 1)
    throw DomainError("mean count: density is for matrix size " +
                      std::to_string(d.matrix_n) + ", expected n+1 = " +
                      std::to_string(p.n + 1));
  if (d.n_samples < 1) throw DomainError("mean count: empty density");

  const double mu = window_center(p);
  const int nb = d.nbins();
  std::vector<double> contrib(static_cast<std::size_t>(nb), kNegInf);
  std::vector<double> se_terms;
  for (int i = 0; i < nb; ++i) {
    const double mass = log_gaussian_mass(d.bin_left(i), d.bin_right(i), mu);
    const double rho = d.density(i);
    if (rho > 0.0) contrib[static_cast<std::size_t>(i)] = std::log(rho) + mass;
    const double se = d.stderr_density(i);
    if (se > 0.0) se_terms.push_back(2.0 * (std::log(se) + mass));
  }
  const double log_int = logsumexp(contrib);
  const WindowCoverage wc = check_window_coverage(
      contrib, log_int,
      "mean count (window center " + std::to_string(mu) + ")");

  MeanCount out;
  out.log_value = log_count_prefactor(p) + log_int;
  out.se_log = se_terms.empty()
                   ? 0.0
                   : std::exp(0.5 * logsumexp(se_terms) - log_int);
  out.coverage = 1.0 - wc.lo_share - wc.hi_share;
  out.source = "mc";
  return out;
}


}  // namespace

MeanCount mean_nk_exact(const LandscapeParams& p, const EmpiricalDensity& density) {
  if (density.k < 0)
    throw DomainError("mean_nk_exact: needs an order-statistic density (k >= 0)");
  if (density.k > p.n)
    throw DomainError("mean_nk_exact: k exceeds n");
  if (density.multiplicity != 1)
    throw DomainError("mean_nk_exact: density must hold a single order statistic");
  return window_integral(p, density);
}

MeanCount mean_neq_exact(const LandscapeParams& p, const EmpiricalDensity& density) {
  if (density.k != -1)
    throw DomainError("mean_neq_exact: needs the stacked total density (k = -1)");
  if (density.multiplicity != density.matrix_n)
    throw DomainError("mean_neq_exact: total density must stack all eigenvalues");
  return window_integral(p, density);
}

MeanCount mean_nk_gaussian(const LandscapeParams& p, int k, goe::Branch branch) {
  if (k < 0 || k > p.n) throw DomainError("mean_nk_gaussian: k outside [0, n]");
  const goe::GaussianApprox g = goe::gaussian_approx(p.n + 1, k, branch);
  const double nu = window_center(p);
  const double v1 = g.sigma * g.sigma + 1.0;
  const double dm = g.mu - nu;
  MeanCount out;
  out.log_value = log_count_prefactor(p) - 0.5 * std::log(v1) -
                  0.5 * dm * dm / v1;
  out.se_log = 0.0;
  out.coverage = 1.0;
  out.source = "gaussian";
  return out;
}

double sigma_eq(double m) {
  if (!(m > 0.0 && m < 1.0))
    throw DomainError("sigma_eq: m outside (0, 1)");
  return 0.5 * (m * m - 1.0) - std::log(m);
}

double sigma_0(double m) {
  const double d = 1.0 - m;
  return sigma_eq(m) - d * d;
}

double pk_simplicity(int k) {
  if (k < 0) throw DomainError("pk_simplicity: negative index");
  return k == 0 ? 1.0 : 0.0;
}

IndexDistribution simplicity_distribution(int kmax) {
  if (kmax < 0) throw DomainError("simplicity_distribution: negative kmax");
  IndexDistribution d;
  d.model = "landscape";
  d.regime = "simplicity";
  d.kind = "discrete";
  d.value_kind = "prob";
  d.scale_exponent = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    d.support.push_back(static_cast<double>(k));
    d.value.push_back(pk_simplicity(k));
  }
  d.normalized = true;
  return d;
}

double log_edge_tilt_integral(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw DomainError("log_edge_tilt_integral: requires delta > 0");
  const auto logf = [delta](double lam) {
    // below the tabulated range the edge density has merged with the bulk
    const double rho =
        lam < -44.0 ? std::sqrt(-lam) / M_PI : special::rho_edge(lam);
    return rho > 0.0 ? delta * lam + std::log(rho) : kNegInf;
  };
  const double peak = delta * delta;
  const double hi0 = peak + 6.0 * std::sqrt(2.0 * delta) + 6.0;
  return log_integrate_expand(logf, -8.0, hi0, 1e-10, 1e-9);
}

ValueSE pk_hierarchy(double delta, const EmpiricalDensity& edge_density) {
  if (!(delta > 0.0)) throw DomainError("pk_hierarchy: requires delta > 0");
  if (edge_density.transform.kind != "edge")
    throw DomainError("pk_hierarchy: density must be edge-rescaled");
  if (edge_density.n_samples < 1)
    throw DomainError("pk_hierarchy: empty density");
  if (edge_density.coverage_fraction() < 0.999)
    throw CoverageError("pk_hierarchy: histogram window misses " +
                        std::to_string(1.0 - edge_density.coverage_fraction()) +
                        " of the order-statistic mass");

  const int nb = edge_density.nbins();
  std::vector<double> terms(static_cast<std::size_t>(nb), 0.0);
  double num = 0.0, var = 0.0;
  int jb = -1, jt = -1;
  for (int i = 0; i < nb; ++i) {
    const double w = (std::exp(delta * edge_density.bin_right(i)) -
                      std::exp(delta * edge_density.bin_left(i))) /
                     delta;
    const double t = edge_density.density(i) * w;
    terms[static_cast<std::size_t>(i)] = t;
    num += t;
    if (t > 0.0) {
      if (jb < 0) jb = i;
      jt = i;
    }
    const double se = edge_density.stderr_density(i) * w;
    var += se * se;
  }
  if (num <= 0.0)
    throw CoverageError("pk_hierarchy: tilted numerator vanished");
  if (jt - jb < 4)
    throw CoverageError("pk_hierarchy: too few populated bins under the tilt");
  // Work in blocks of bins so sparse single-sample bins in the far tail do
  // not masquerade as structure. The tilted integrand must peak strictly
  // inside the populated range, and the geometric decay of the outermost
  // blocks bounds the mass beyond the reach of the samples.
  {
    const int len = jt - jb + 1;
    const int bw = std::max(3, len / 8);
    std::vector<double> avg, mass;  // outermost block first
    for (int hi = jt; hi >= jb; hi -= bw) {
      const int lo = std::max(jb, hi - bw + 1);
      double s = 0.0;
      for (int i = lo; i <= hi; ++i) s += terms[static_cast<std::size_t>(i)];
      mass.push_back(s);
      avg.push_back(s / (hi - lo + 1));
    }
    double rest = 0.0;
    for (std::size_t i = 1; i < avg.size(); ++i) rest = std::max(rest, avg[i]);
    if (avg.size() < 2 || avg.front() >= rest)
      throw CoverageError(
          "pk_hierarchy: tilt still rising at the boundary of the sampled "
          "support");
    const double r = avg[1] > 0.0 ? avg.front() / avg[1] : 1.0;
    if (r >= 0.999 ||
        mass.front() * r / (1.0 - r) > kTailExtrapolationTol * num)
      throw CoverageError(
          "pk_hierarchy: sampled support ends while the tilted integrand is "
          "still significant; more samples are needed for this tilt");
  }
  const double den = std::exp(log_edge_tilt_integral(delta));
  return {num / den, std::sqrt(var) / den};
}

double neq_hierarchy(double delta) {
  if (!(delta > 0.0)) throw DomainError("neq_hierarchy: requires delta > 0");
  const double d3 = delta * delta * delta;
  return 2.0 * std::exp(-d3 / 3.0 + log_edge_tilt_integral(delta));
}

IndexDistribution hierarchy_distribution(double delta,
                                         const goe::EdgeFamily& family) {
  if (family.per_k.empty())
    throw DomainError("hierarchy_distribution: empty edge family");
  IndexDistribution d;
  d.model = "landscape";
  d.regime = "hierarchy";
  d.kind = "discrete";
  d.value_kind = "prob";
  d.scale_exponent = 0.0;
  d.params = {{"delta", delta},
              {"n", static_cast<double>(family.per_k.front().matrix_n)},
              {"samples", static_cast<double>(family.per_k.front().n_samples)}};
  for (std::size_t k = 0; k < family.per_k.size(); ++k) {
    const ValueSE pk = pk_hierarchy(delta, family.per_k[k]);
    d.support.push_back(static_cast<double>(k));
    d.value.push_back(pk.value);
    d.se.push_back(pk.se);
  }
  d.normalized = false;  // finite-n estimate of an infinite partition
  return d;
}

double toppling_constant() {
  return std::pow(3.0 * M_PI / (4.0 * std::sqrt(2.0)), 2.0 / 3.0);
}

namespace {

// Int_0^kappa e^{-(delta + c x^{2/3})^2} dx via x = u^3, which removes the
// cusp at the origin.
double toppling_partial(double delta, double kappa) {
  const double c = toppling_constant();
  const double peak = delta < 0.0 ? 0.0 : delta * delta;
  const double target = std::sqrt(peak + 60.0);
  const double u_cut = std::sqrt((target - delta) / c);
  const double ub = std::min(std::cbrt(kappa), u_cut);
  if (ub <= 0.0) return 0.0;
  const auto f = [delta, c](double u) {
    const double a = delta + c * u * u;
    return 3.0 * u * u * std::exp(-a * a);
  };
  return integrate_adaptive(f, 0.0, ub, 1e-11);
}

}  // namespace

double toppling_norm(double delta) {
  if (!std::isfinite(delta)) throw DomainError("toppling_norm: non-finite delta");
  return toppling_partial(delta, std::numeric_limits<double>::infinity());
}

double toppling_density(double delta, double x) {
  if (!std::isfinite(delta) || !std::isfinite(x))
    throw DomainError("toppling_density: non-finite argument");
  if (x < 0.0) throw DomainError("toppling_density: x must be >= 0");
  const double c = toppling_constant();
  const double a = delta + c * std::cbrt(x * x);
  return std::exp(-a * a) / toppling_norm(delta);
}

double toppling_cdf(double delta, double kappa) {
  if (!std::isfinite(delta) || !std::isfinite(kappa))
    throw DomainError("toppling_cdf: non-finite argument");
  if (kappa < 0.0) throw DomainError("toppling_cdf: kappa must be >= 0");
  return toppling_partial(delta, kappa) / toppling_norm(delta);
}

double kappa_max_toppling(double delta) {
  if (!std::isfinite(delta)) throw DomainError("kappa_max_toppling: non-finite");
  if (delta >= 0.0) return 0.0;
  return std::pow(-delta / toppling_constant(), 1.5);
}

double neq_toppling(double delta, int n) {
  if (n < 1) throw DomainError("neq_toppling: n must be >= 1");
  return 2.0 * std::pow(static_cast<double>(n), 0.25) *
         std::exp(delta * delta) * toppling_norm(delta);
}

IndexDistribution toppling_distribution(double delta, double kappa_hi,
                                        int npoints) {
  if (!(kappa_hi > 0.0) || npoints < 2)
    throw DomainError("toppling_distribution: bad grid");
  IndexDistribution d;
  d.model = "landscape";
  d.regime = "toppling";
  d.kind = "continuous";
  d.value_kind = "density";
  d.scale_exponent = 0.25;
  d.params = {{"delta", delta}};
  const double z = toppling_norm(delta);
  const double c = toppling_constant();
  for (int i = 0; i < npoints; ++i) {
    const double x = kappa_hi * static_cast<double>(i) /
                     static_cast<double>(npoints - 1);
    const double a = delta + c * std::cbrt(x * x);
    d.support.push_back(x);
    d.value.push_back(std::exp(-a * a) / z);
  }
  d.normalized = true;
  return d;
}

double kappa_max_complexity(double m) {
  if (!(m > 0.0 && m < 1.0))
    throw DomainError("kappa_max_complexity: m outside (0, 1)");
  return special::semicircle_cdf(m);
}

double complexity_cdf(double m, double kappa) {
  if (!(m > 0.0 && m < 1.0))
    throw DomainError("complexity_cdf: m outside (0, 1)");
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("complexity_cdf: kappa outside [0, 1]");
  return kappa >= kappa_max_complexity(m) ? 1.0 : 0.0;
}

double neq_complexity(const LandscapeParams& p) {
  if (!(p.m > 0.0 && p.m < 1.0))
    throw DomainError("neq_complexity: m outside (0, 1)");
  if (p.n < 1) throw DomainError("neq_complexity: n must be >= 1");
  const double n = static_cast<double>(p.n);
  return n * sigma_eq(p.m) +
         std::log(4.0 * std::sqrt(n / M_PI) * std::sqrt(1.0 - p.m * p.m));
}

IndexDistribution complexity_distribution(double m, int npoints) {
  if (npoints < 2) throw DomainError("complexity_distribution: bad grid");
  IndexDistribution d;
  d.model = "landscape";
  d.regime = "complexity";
  d.kind = "continuous";
  d.value_kind = "cdf";
  d.scale_exponent = 1.0;
  d.params = {{"m", m}};
  const double atom = kappa_max_complexity(m);
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

}  // namespace landscape
}  // namespace saddlestat
