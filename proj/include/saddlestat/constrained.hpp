#pragma once

// Fixed-energy random landscape: stationary points counted at a prescribed
// energy level eps0. The joint large-deviation exponent lives on the
// (s, R) plane,
//   F(s, R) = f(s; m) + g(R; m) + h(s, R; m, eps0, q),
//   g(R) = m^2 R^2/2 - ln R,
//   h(s, R) = (sqrt(2) s - m + q eps0 - (m/2) R^2)^2 / (2 (q^2 - 1)),
// and the count at fixed energy is the unconstrained window integral dressed
// by a per-unit-eps0 geometric weight that integrates to one over the level.
// The phase diagram in the (m, eps0) plane has a positive-complexity region
// bounded by two curves meeting at the critical point (1, -1/(2q)). For
// m > 1 the exponent stays negative everywhere except along the ridge
// eps0 = -1/(2 q m), the level of the typical single minimum, where it
// vanishes identically (saddle s = (m + 1/m)/sqrt2, R = 1/m). The index
// transition across the critical point carries the same toppling mechanism
// as the unconstrained model, with a q-dependent drift and scale.

#include <string>
#include <utility>
#include <vector>

#include "saddlestat/histogram.hpp"
#include "saddlestat/index_distribution.hpp"
#include "saddlestat/landscape.hpp"

namespace saddlestat {
namespace constrained {

struct ConstrainedParams {
  double m = 1.0;     // rescaled coupling strength, > 0
  double eps0 = 0.0;  // rescaled energy level
  double q = 2.0;     // correlation-shape parameter, > 1
  int n = 1;          // state-space dimension
};

// Stationary point of F at fixed (m, eps0, q). s always positive and
// increasing in m; s < sqrt(2) exactly on m < m_c, s = sqrt(2) at m = m_c.
// delta = sqrt(2 (1 + q^2) + q^2 (m q - eps0)^2) is the discriminant; the
// defining relation is R^2 m + q (m q - eps0) = delta.
struct SaddlePoint {
  double s = 0.0;
  double r = 0.0;
  double delta = 0.0;
};
SaddlePoint saddle_points(double m, double eps0, double q);

double f_joint(double s, double r, double m, double eps0, double q);

// Boundary coupling m_c = 1 + (1 + 2 q eps0)/(2 q^2) separating the two
// exponent branches, and the threshold level eps_th = -(1 + 2 q^2)/(2 q)
// where m_c reaches zero. Pure arithmetic; q > 0 suffices here.
double m_c(double eps0, double q);
double eps_threshold(double q);

// Annealed complexity exponent of the total count at fixed level. Below m_c
// it is -F at the saddle; above m_c the spectrum must deform to keep the
// level, adding phi(s) = s sqrt(s^2 - 2)/2 - ln((s + sqrt(s^2 - 2))/sqrt(2))
// at the shifted saddle. Continuous with continuous first m-derivative at
// m_c; the second derivative jumps. sigma_eq_constrained dispatches on m_c;
// the branch functions are exposed for one-sided derivative work, and the
// above-m_c branch throws BranchError when its saddle falls at or below
// sqrt(2) (the caller picked the wrong side).
double sigma_eq_constrained(double m, double eps0, double q);
double sigma_eq_below_mc(double m, double eps0, double q);
double sigma_eq_above_mc(double m, double eps0, double q);

// Two-curve boundary of the positive-complexity region, sampled on a grid
// of m in (0, 1]: for each m the two roots in eps0 of sigma_eq = 0 around
// its maximizer, bisected to 1e-12. Both curves approach (1, -1/(2q)).
struct PhaseDiagram {
  double q = 0.0;
  std::vector<double> m_grid;
  std::vector<double> eps_minus;
  std::vector<double> eps_plus;
  double line_level = 0.0;                     // eps0 = -1/(2q) for m >= 1
  std::pair<double, double> critical_point{0.0, 0.0};
  double threshold = 0.0;                      // eps_th(q)
  double toppling_boundary_slope = 0.0;        // eps = q delta microscopically
  void write_csv(std::ostream& os) const;
  std::string to_json_string() const;
};
PhaseDiagram phase_curves(double q, const std::vector<double>& m_grid);

// Microscopic index distribution near the critical point: the crossover
// variable sigma = scale * kappa^(2/3) carries a drift
//   drift = 2 sqrt(2) q (q delta - eps) / sqrt((2 q^2 - 1) (2 q^2 + 3)),
// and P(kappa) is the normalized mass of sqrt(sigma) e^{-sigma^2/2 -
// drift sigma} below sigma(kappa). An alternative drift normalization with
// (q^2 + 2) under the root circulates; it differs by the exact factor
// sqrt((2 q^2 + 3)/(q^2 + 2)) and is kept only for regression.
double toppling_drift(double delta, double eps, double q);
double toppling_drift_alt(double delta, double eps, double q);
double toppling_scale(double q);  // maps kappa^(2/3) to sigma
double toppling_cdf_constrained(double delta, double eps, double q, double kappa);
double toppling_density_constrained(double delta, double eps, double q, double kappa);
double kappa_max_constrained(double delta, double eps, double q);
IndexDistribution toppling_distribution_constrained(double delta, double eps,
                                                    double q, double kappa_hi,
                                                    int npoints);

// Macroscopic index ratio on 0 < m < m_c: kappa = k/n concentrates on the
// semicircle tail mass above the saddle location s/sqrt(2).
double kappa_max_complexity_constrained(double m, double eps0, double q);
double complexity_cdf_constrained(double m, double eps0, double q, double kappa);
IndexDistribution complexity_distribution_constrained(double m, double eps0,
                                                      double q, int npoints);

// Per-unit-eps0 geometric weight at fixed s: integrates to one over eps0.
double log_energy_weight(double s, double m, double eps0, double q, int n);

// Exact finite-n mean counts per unit eps0, from the same empirical
// eigenvalue densities as the unconstrained module. The level-dependent
// weight is Gaussian in the eigenvalue coordinate at fixed R, so each bin
// keeps an exact window mass; the R direction is integrated adaptively in
// log space.
landscape::MeanCount mean_nk_exact_constrained(const ConstrainedParams& p,
                                               const EmpiricalDensity& density);
landscape::MeanCount mean_neq_exact_constrained(const ConstrainedParams& p,
                                                const EmpiricalDensity& density);

// Leading decay exponent of the mean total count along the critical line at
// level eps0_c; zero exactly at eps0_c = -1/(2q), negative on both sides,
// turning positive again only deep near the threshold where the log entropy
// of the shrinking saddle radius dominates. Where it is negative the mean
// count decays exponentially and index fractions are ratios of vanishing
// means; flagged, not refused.
double line_decay_exponent(double eps0_c, double q);
bool ratios_lose_interpretation(double eps0_c, double q);

}  // namespace constrained
}  // namespace saddlestat
