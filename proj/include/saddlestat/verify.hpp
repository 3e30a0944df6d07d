#pragma once

// Dual-Monte-Carlo oracle harness. Each check pits two independent estimates
// of the same quantity against each other and reports a z-score; nothing in
// here reuses the closed forms it is checking.
//
// The determinant identity: with the n-dim ensemble weighted by
// exp(-n Tr M^2 / (4 mu_c^2)),
//   < |det(z - M)| Theta_k(z - M) >
//     = sqrt(2) (2/N)^{N/2} mu_c^N Gamma((N+1)/2)
//       * e^{N z^2 / (4 mu_c^2)} rho_{N+1}^{(k+1)}(z sqrt(N / (2 mu_c^2)))
// where Theta_k selects draws with exactly k eigenvalues above z and
// rho_{N+1}^{(k+1)} is the density of the (k+1)-th largest eigenvalue of the
// (N+1)-dim ensemble in unit-weight units (variance_scale = 1/2). The left
// side is a matrix average, the right side an order-statistic density; the
// check estimates both by Monte Carlo from disjoint seeds.
//
// Density at a point is the delicate step: the harness forms a Gaussian
// kernel estimate with Silverman bandwidth and a narrow-bin histogram
// estimate from the same draws, and requires the two to agree within their
// combined errors before trusting either.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "saddlestat/goe.hpp"

namespace saddlestat {
namespace verify {

struct McSettings {
  std::int64_t n_samples = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
};

// One verdict. pass reflects exactly the stated criterion of the check that
// produced the report; status adds "inconclusive" for sample sizes too small
// to decide either way (pass stays false but the report is not a failure).
// metadata rows keep insertion order so serialization is reproducible.
struct CheckReport {
  std::string check_name;
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_lhs = 0.0;
  double stderr_rhs = 0.0;
  double z_score = 0.0;
  bool pass = false;
  std::string status;  // "pass" | "fail" | "inconclusive"
  std::vector<std::pair<std::string, double>> metadata;

  void push(const std::string& key, double value);
  std::string to_json_line() const;
};

// Kernel and histogram density estimates at a point, from the same samples.
struct PointDensity {
  double kde = 0.0;
  double se_kde = 0.0;
  double binned = 0.0;
  double se_binned = 0.0;
  double bandwidth = 0.0;
  double agreement_z = 0.0;
};

// Gaussian KDE with Silverman bandwidth evaluated at x, cross-checked by a
// centered bin of one bandwidth width. Throws CoverageError when the bin
// holds no samples.
PointDensity density_at_point(const std::vector<double>& samples, double x);

// Determinant identity at (n, k, z, mu_c). LHS: mean |det(z - M)| over draws
// with exactly k eigenvalues above z, variance_scale mu_c^2 / n. RHS: the
// prefactor times the order-statistic density at z sqrt(n / (2 mu_c^2)) from
// (n+1)-dim unit-weight draws. Passes when |z-score| <= 3 and the two density
// estimates agree.
CheckReport check_relation(int n, int k, double z, double mu_c,
                           const McSettings& s);

// Edge self-convergence for the (k+1)-th largest eigenvalue: edge-rescaled
// samples at n vs at 2n, compared by the two-sample KS statistic at the 1%
// level, plus kernel mode agreement within 0.1. z_score is scaled so the KS
// pass boundary sits at 3. Requires n >= 500, k <= 4; fewer than 4000
// samples per side is inconclusive.
CheckReport check_tw_approx(int n, int k, const McSettings& s);

// Stacked edge order-statistic densities k = 0..kmax against the soft-edge
// density: per-bin z-scores with a threshold widened for the number of bins
// compared. lhs/rhs hold the worst bin's pair.
CheckReport check_edge_partition(int n, int kmax, const McSettings& s);

// Location/width approximation for one order statistic. The approximation
// claims lambda_(k+1) ~ N(mu_k, sigma_k^2) with mean accuracy at the sigma_k
// scale, so the mean test uses the combined error
// sqrt(sigma_k^2 + stderr_mean^2); the width test compares the sample sd to
// sigma_k as a ratio, reported in the metadata.
CheckReport check_gaussian_approx(int n, int k, goe::Branch branch,
                                  const McSettings& s);

// Finite-n exact counts against a limiting regime formula along an ascending
// n_list. Supported (model, regime) pairs and their params keys:
//   landscape  simplicity  {m}                d_i = 1 - p_0(n_i)
//   landscape  toppling    {delta, kappa}     d_i = |cdf_n(kappa) - cdf(kappa)|
//   constrained complexity {m, eps0, q, kappa} same, per unit level
//   pspin      region-a    {B}                d_i = |<N_eq>(n_i) - 2|
// Each exact value comes from the MC quadrature at n_i with per-n sample
// counts s.n_samples. Fails when a later discrepancy exceeds an earlier one
// beyond twice the combined error, or when the last is not below the first.
struct ConvergenceSpec {
  std::string model;
  std::string regime;
  std::vector<std::pair<std::string, double>> params;
  std::vector<int> n_list;
};
CheckReport check_regime_convergence(const ConvergenceSpec& spec,
                                     const McSettings& s);

void write_json_lines(std::ostream& os, const std::vector<CheckReport>& reports);
void write_summary(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace verify
}  // namespace saddlestat
