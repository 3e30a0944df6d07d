#pragma once

// Unconstrained random energy landscape: exact finite-n mean counts of
// stationary points with k unstable directions, and the four scaling regimes
// of the transition at m = 1 (simplicity, hierarchy, toppling, complexity).
//
// After the reduction to the eigenvalue coordinate x = sqrt(n) s, the exact
// mean count is
//   <N_k> = c_n m^{-n} e^{n m^2/2} Int rho^{(k+1)}_{n+1}(x) e^{-(x-mu)^2/2} dx
// with mu = sqrt(2n) m and c_n = sqrt(2/pi) (2/n)^{n/2} Gamma((n+1)/2); the
// density factor is the pdf of the (k+1)-th largest eigenvalue of the
// (n+1)-dimensional ensemble sampled by the goe module at v = 1/2. Everything
// is evaluated in log space.

#include <string>

#include "saddlestat/goe.hpp"
#include "saddlestat/histogram.hpp"
#include "saddlestat/index_distribution.hpp"

namespace saddlestat {
namespace landscape {

struct LandscapeParams {
  double m = 1.0;  // rescaled coupling strength, > 0
  int n = 1;       // state-space dimension
};

// Scaling regime selector; delta is the microscopic parameter for the
// hierarchy (m = 1 + delta n^{-1/3}) and toppling (m = 1 + delta n^{-1/2})
// regimes, m the macroscopic location for simplicity (m > 1) and complexity
// (0 < m < 1).
struct RegimeSpec {
  std::string region;  // "simplicity" | "hierarchy" | "toppling" | "complexity"
  double delta = 0.0;
  double m = 0.0;
};
void validate(const RegimeSpec& spec);

// f(s; m) = (s - m/sqrt(2))^2 - s^2/2, the exponent of the count integral in
// the original coordinate; minimized at s* = sqrt(2) m with value -m^2/2.
double f_exponent(double s, double m);

// log of c_n m^{-n} e^{n m^2/2} and the window center sqrt(2n) m.
double log_count_prefactor(const LandscapeParams& p);
double window_center(const LandscapeParams& p);

struct MeanCount {
  double log_value = 0.0;
  double se_log = 0.0;      // stderr of log_value; 0 for deterministic sources
  double coverage = 1.0;    // 1 - boundary-bin contribution share
  std::string source;       // "mc" | "gaussian"
};

// Exact mean counts from an empirical eigenvalue density of the
// (n+1)-dimensional ensemble: order-statistic density for <N_k>, stacked
// total density for <N_eq>. The density must be raw-scale (no edge zoom).
MeanCount mean_nk_exact(const LandscapeParams& p, const EmpiricalDensity& density);
MeanCount mean_neq_exact(const LandscapeParams& p, const EmpiricalDensity& density);

// Fast source: Gaussian order-statistic approximation in place of the MC
// density; closed-form Gaussian-window overlap.
MeanCount mean_nk_gaussian(const LandscapeParams& p, int k, goe::Branch branch);

// Annealed complexity of the total count and of minima on 0 < m < 1.
double sigma_eq(double m);
double sigma_0(double m);

// Regime a), m > 1: p_k = delta_{k,0}.
double pk_simplicity(int k);
IndexDistribution simplicity_distribution(int kmax);

struct ValueSE {
  double value = 0.0;
  double se = 0.0;
};

// Regime b), m = 1 + delta n^{-1/3}, delta > 0: p_k is a ratio of
// exponentially tilted integrals over the soft-edge order-statistic laws.
// The numerator comes from an edge-rescaled MC histogram of the (k+1)-th
// largest eigenvalue, the denominator from deterministic rho_edge quadrature.
double log_edge_tilt_integral(double delta);
ValueSE pk_hierarchy(double delta, const EmpiricalDensity& edge_density);
double neq_hierarchy(double delta);
IndexDistribution hierarchy_distribution(double delta, const goe::EdgeFamily& family);

// Regime c), m = 1 + delta n^{-1/2}: continuous density of kappa = k n^{-1/4},
// p(x) proportional to e^{-(delta + c x^{2/3})^2} with c = (3 pi/(4 sqrt 2))^{2/3}.
double toppling_constant();
double toppling_norm(double delta);
double toppling_density(double delta, double x);
double toppling_cdf(double delta, double kappa);
double kappa_max_toppling(double delta);
double neq_toppling(double delta, int n);
IndexDistribution toppling_distribution(double delta, double kappa_hi, int npoints);

// Regime d), 0 < m < 1: kappa = k/n concentrates on the semicircle tail mass
// t(m); the distribution is a unit atom at t(m). neq_complexity returns
// log<N_eq> = n Sigma_eq(m) + log(4 sqrt(n/pi) sqrt(1-m^2)).
double kappa_max_complexity(double m);
double complexity_cdf(double m, double kappa);
double neq_complexity(const LandscapeParams& p);
IndexDistribution complexity_distribution(double m, int npoints);

}  // namespace landscape
}  // namespace saddlestat
