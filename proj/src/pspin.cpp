#include "saddlestat/pspin.hpp"

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
namespace pspin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of Int_a^b e^{-B t^2/2} dt by Gauss-Legendre in log space; exact width
// at B = 0, safe against overflow for B < 0 far from the origin.
double log_even_mass(double a, double b, double B) {
  const GaussLegendreRule& r = gauss_legendre(8);
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  std::vector<double> terms(r.nodes.size());
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double t = c + s * r.nodes[i];
    terms[i] = std::log(r.weights[i] * s) - 0.5 * B * t * t;
  }
  return logsumexp(terms);
}

double log_count_prefactor_pspin(double B, int n) {
  // c'_n / sqrt(n): the sqrt(n) cancels against the substitution
  // lambda = sqrt(n) s in the counting integral.
  return std::log(2.0) +
         0.5 * (n + 1.0) * (std::log1p(B) - std::log1p(-B)) +
         0.5 * std::log1p(-B);
}

MeanCount weighted_window_integral(double B, int n, const EmpiricalDensity& d) {
  if (!(B > -1.0 && B < 1.0))
    throw DomainError("mean count: B outside (-1, 1)");
  if (n < 1) throw DomainError("mean count: n must be >= 1");
  if (d.transform.kind != "identity")
    throw DomainError("mean count: density must be raw-scale, not " +
                      d.transform.kind);
  if (d.matrix_n != n + 1)
    throw DomainError("mean count: density is for matrix size " +
                      std::to_string(d.matrix_n) + ", expected n+1 = " +
                      std::to_string(n + 1));
  if (d.n_samples < 1) throw DomainError("mean count: empty density");

  const int nb = d.nbins();
  std::vector<double> contrib(static_cast<std::size_t>(nb), kNegInf);
  std::vector<double> se_terms;
  for (int i = 0; i < nb; ++i) {
    const double mass = log_even_mass(d.bin_left(i), d.bin_right(i), B);
    const double rho = d.density(i);
    if (rho > 0.0) contrib[static_cast<std::size_t>(i)] = std::log(rho) + mass;
    const double se = d.stderr_density(i);
    if (se > 0.0) se_terms.push_back(2.0 * (std::log(se) + mass));
  }
  const double log_int = logsumexp(contrib);
  const WindowCoverage wc = check_window_coverage(
      contrib, log_int, "mean count (B = " + std::to_string(B) + ")");

  MeanCount out;
  out.log_value = log_count_prefactor_pspin(B, n) + log_int;
  out.se_log = se_terms.empty()
                   ? 0.0
                   : std::exp(0.5 * logsumexp(se_terms) - log_int);
  out.coverage = 1.0 - wc.lo_share - wc.hi_share;
  out.source = "mc";
  return out;
}

void base_record(IndexDistribution& d, const std::string& regime) {
  d.model = "pspin";
  d.regime = regime;
}

std::vector<std::pair<std::string, double>> raw_params(const PSpinParams& pp,
                                                       double B) {
  return {{"J", pp.J},
          {"sigma", pp.sigma},
          {"p", static_cast<double>(pp.p)},
          {"n", static_cast<double>(pp.n)},
          {"B", B}};
}

}  // namespace

double b_param(double J, double sigma, int p) {
  if (!(J > 0.0) || !std::isfinite(J))
    throw DomainError("b_param: J must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("b_param: sigma must be >= 0");
  if (p < 2) throw DomainError("b_param: p must be >= 2");
  const double j2 = J * J, s2 = sigma * sigma;
  return (j2 * (p - 2) - s2) / (j2 * p + s2);
}

PSpinParams make_params(double J, double sigma, int p, int n) {
  if (n < 1) throw DomainError("make_params: n must be >= 1");
  PSpinParams pp;
  pp.J = J;
  pp.sigma = sigma;
  pp.p = p;
  pp.n = n;
  pp.B = b_param(J, sigma, p);
  return pp;
}

MeanCount mean_nk_pspin(double B, int n, int k, const EmpiricalDensity& density) {
  if (k < 0 || k > n) throw DomainError("mean_nk_pspin: k outside [0, n]");
  if (density.k != k)
    throw DomainError("mean_nk_pspin: density holds order statistic " +
                      std::to_string(density.k) + ", not " + std::to_string(k));
  if (density.multiplicity != 1)
    throw DomainError("mean_nk_pspin: density must hold a single order statistic");
  return weighted_window_integral(B, n, density);
}

MeanCount mean_neq_pspin(double B, int n, const EmpiricalDensity& density) {
  if (density.k != -1)
    throw DomainError("mean_neq_pspin: needs the stacked total density (k = -1)");
  if (density.multiplicity != density.matrix_n)
    throw DomainError("mean_neq_pspin: total density must stack all eigenvalues");
  return weighted_window_integral(B, n, density);
}

double pk_region_a_pspin(int k, int n) {
  if (n < 1) throw DomainError("pk_region_a_pspin: n must be >= 1");
  if (k < 0 || k > n) throw DomainError("pk_region_a_pspin: k outside [0, n]");
  return (k == 0 || k == n) ? 0.5 : 0.0;
}

double neq_region_a_pspin() { return 2.0; }

IndexDistribution region_a_distribution(const PSpinParams& params) {
  const double B = b_param(params.J, params.sigma, params.p);
  if (!(B < 0.0))
    throw DomainError("region_a_distribution: requires B < 0");
  if (params.n < 1) throw DomainError("region_a_distribution: n must be >= 1");
  IndexDistribution d;
  base_record(d, "region-a");
  d.kind = "discrete";
  d.value_kind = "prob";
  d.scale_exponent = 0.0;
  d.params = raw_params(params, B);
  // both end-runs of the index range; interior zeros are implied
  std::vector<int> ks;
  for (int k : {0, 1, 2, params.n - 2, params.n - 1, params.n})
    if (k >= 0 && k <= params.n) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int k : ks) {
    d.support.push_back(static_cast<double>(k));
    d.value.push_back(pk_region_a_pspin(k, params.n));
  }
  d.normalized = true;
  return d;
}

ValueSE pk_region_b_pspin(double beta, int k,
                          const goe::EdgeFamily& family) {
  if (!(beta > 0.0)) throw DomainError("pk_region_b_pspin: requires beta > 0");
  if (k < 0) throw DomainError("pk_region_b_pspin: negative index");
  if (k >= static_cast<int>(family.per_k.size()))
    throw DomainError("pk_region_b_pspin: k beyond the sampled edge family");
  const ValueSE h = landscape::pk_hierarchy(beta, family.per_k[static_cast<std::size_t>(k)]);
  return {0.5 * h.value, 0.5 * h.se};
}

double neq_region_b_pspin(double beta) {
  if (!(beta > 0.0)) throw DomainError("neq_region_b_pspin: requires beta > 0");
  return 2.0 * landscape::neq_hierarchy(beta);
}

IndexDistribution region_b_distribution(double beta,
                                        const goe::EdgeFamily& family) {
  if (family.per_k.empty())
    throw DomainError("region_b_distribution: empty edge family");
  IndexDistribution d;
  base_record(d, "region-b");
  d.kind = "discrete";
  d.value_kind = "prob";
  d.scale_exponent = 0.0;
  d.params = {{"beta", beta},
              {"n", static_cast<double>(family.per_k.front().matrix_n)},
              {"samples", static_cast<double>(family.per_k.front().n_samples)}};
  for (std::size_t k = 0; k < family.per_k.size(); ++k) {
    const ValueSE pk = pk_region_b_pspin(beta, static_cast<int>(k), family);
    d.support.push_back(static_cast<double>(k));
    d.value.push_back(pk.value);
    d.se.push_back(pk.se);
  }
  // one spectral edge of the mirrored pair; each end sums to 1/2
  d.normalized = false;
  return d;
}

double tilt_norm_region_c(double beta) {
  if (!std::isfinite(beta))
    throw DomainError("tilt_norm_region_c: non-finite beta");
  // Int_{-1}^{1} e^{beta t^2} rho_sc(t) dt with t = sin(theta); the
  // substitution absorbs the square-root edge behavior of the density.
  const double z = integrate_adaptive(
      [beta](double th) {
        const double c = std::cos(th), s = std::sin(th);
        return (2.0 / M_PI) * std::exp(beta * s * s) * c * c;
      },
      -0.5 * M_PI, 0.5 * M_PI, 1e-12);
  if (!std::isfinite(z))
    throw DomainError("tilt_norm_region_c: tilt overflows for beta = " +
                      std::to_string(beta));
  return z;
}

double density_region_c_pspin(double beta, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("density_region_c_pspin: x outside [0, 1]");
  const double q = special::semicircle_quantile(x);
  return std::exp(beta * q * q) / tilt_norm_region_c(beta);
}

double cdf_region_c_pspin(double beta, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("cdf_region_c_pspin: kappa outside [0, 1]");
  if (kappa == 0.0) return 0.0;
  if (kappa == 1.0) return 1.0;
  // Int_0^kappa p(x) dx = Int_{Q_kappa}^{1} e^{beta t^2} rho_sc(t) dt / Z
  const double th0 = std::asin(special::semicircle_quantile(kappa));
  const double num = integrate_adaptive(
      [beta](double th) {
        const double c = std::cos(th), s = std::sin(th);
        return (2.0 / M_PI) * std::exp(beta * s * s) * c * c;
      },
      th0, 0.5 * M_PI, 1e-12, 1e-14);
  return num / tilt_norm_region_c(beta);
}

double neq_region_c_pspin(double beta, int n) {
  if (n < 1) throw DomainError("neq_region_c_pspin: n must be >= 1");
  return 2.0 * static_cast<double>(n) * std::exp(-beta) *
         tilt_norm_region_c(beta);
}

IndexDistribution region_c_distribution(double beta, int npoints) {
  if (npoints < 2) throw DomainError("region_c_distribution: bad grid");
  IndexDistribution d;
  base_record(d, "region-c");
  d.kind = "continuous";
  d.value_kind = "density";
  d.scale_exponent = 1.0;
  d.params = {{"beta", beta}};
  const double z = tilt_norm_region_c(beta);
  for (int i = 0; i < npoints; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(npoints - 1);
    const double q = special::semicircle_quantile(x);
    d.support.push_back(x);
    d.value.push_back(std::exp(beta * q * q) / z);
  }
  d.normalized = true;
  return d;
}

double cdf_region_d_pspin(double B, double kappa) {
  if (!(B > 0.0 && B < 1.0))
    throw DomainError("cdf_region_d_pspin: B outside (0, 1)");
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("cdf_region_d_pspin: kappa outside [0, 1]");
  return kappa >= 0.5 ? 1.0 : 0.0;
}

double neq_region_d_pspin(double B, int n) {
  if (!(B > 0.0 && B < 1.0))
    throw DomainError("neq_region_d_pspin: B outside (0, 1)");
  if (n < 1) throw DomainError("neq_region_d_pspin: n must be >= 1");
  const double nn = static_cast<double>(n);
  return 0.5 * nn * (std::log1p(B) - std::log1p(-B)) + std::log(4.0) +
         0.5 * std::log(nn) + 0.5 * (std::log1p(B) - std::log(M_PI * B));
}

IndexDistribution region_d_distribution(const PSpinParams& params, int npoints) {
  if (npoints < 2) throw DomainError("region_d_distribution: bad grid");
  const double B = b_param(params.J, params.sigma, params.p);
  if (!(B > 0.0))
    throw DomainError("region_d_distribution: requires B > 0");
  IndexDistribution d;
  base_record(d, "region-d");
  d.kind = "continuous";
  d.value_kind = "cdf";
  d.scale_exponent = 1.0;
  d.params = raw_params(params, B);
  for (int i = 0; i < npoints; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(npoints - 1);
    d.support.push_back(x);
    d.value.push_back(x >= 0.5 ? 1.0 : 0.0);
  }
  d.normalized = true;
  d.has_atom = true;
  d.atom_location = 0.5;
  d.atom_mass = 1.0;
  return d;
}

}  // namespace pspin
}  // namespace saddlestat
