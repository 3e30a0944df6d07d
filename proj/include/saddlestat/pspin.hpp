#pragma once

// Spherical p-spin model with an external random field. The pair of variance
// scales (J, sigma) and the interaction order p enter the counting problem
// only through
//   B = (J^2 (p - 2) - sigma^2) / (J^2 p + sigma^2)   in (-1, (p-2)/p],
// and the exact mean number of stationary points with k unstable directions
// in dimension n is
//   <N_k> = c'_n Int e^{-n B s^2/2} rho^{(k+1)}_{n+1}(sqrt(n) s) ds,
//   c'_n  = 2 sqrt(n) ((1+B)/(1-B))^{(n+1)/2} sqrt(1-B),
// with rho^{(k+1)}_{n+1} the density of the (k+1)-th largest eigenvalue of
// the (n+1)-dimensional ensemble sampled by the goe module at v = 1/2. At
// B = 0 the weight drops out and <N_eq> = 2(n+1) exactly.
//
// Four large-n regions in B, mirroring the unconstrained landscape but with
// the index distribution symmetric under k -> n - k (the two spectral edges
// play identical roles):
//   a) -1 < B < 0 fixed:       p_k = (delta_{k,0} + delta_{k,n})/2
//   b) B = -beta n^{-1/3}:     half the edge-tilt hierarchy ratio, mirrored
//   c) B = -beta / n:          continuous density of kappa = k/n on [0, 1]
//   d) 0 < B <= (p-2)/p fixed: unit atom at kappa = 1/2

#include "saddlestat/goe.hpp"
#include "saddlestat/histogram.hpp"
#include "saddlestat/index_distribution.hpp"
#include "saddlestat/landscape.hpp"

namespace saddlestat {
namespace pspin {

using landscape::MeanCount;
using landscape::ValueSE;

struct PSpinParams {
  double J = 1.0;      // interaction scale, > 0
  double sigma = 0.0;  // external-field scale, >= 0
  int p = 3;           // interaction order, >= 2
  int n = 1;           // matrix/index dimension; k runs over [0, n]
  double B = 1.0 / 3.0;
};

// B = (J^2 (p-2) - sigma^2) / (J^2 p + sigma^2).
double b_param(double J, double sigma, int p);
PSpinParams make_params(double J, double sigma, int p, int n);

// Exact counting by log-space quadrature of the weighted order-statistic
// density: single order statistic k for <N_k>, stacked total density for
// <N_eq>. The density must be raw-scale with matrix size n + 1; coverage of
// the weighted integrand is gated as in the landscape module. For B < 0 the
// weight grows away from the origin and the integral is carried by the far
// spectral edges, so the sampled window must reach past them.
MeanCount mean_nk_pspin(double B, int n, int k, const EmpiricalDensity& density);
MeanCount mean_neq_pspin(double B, int n, const EmpiricalDensity& density);

// Region a), -1 < B < 0 fixed: the index sits at one of the two ends.
double pk_region_a_pspin(int k, int n);
double neq_region_a_pspin();
IndexDistribution region_a_distribution(const PSpinParams& params);

// Region b), B = -beta n^{-1/3}, beta > 0: p_k at distance k from either
// end of the index range is half the unconstrained edge-tilt hierarchy
// ratio; each end carries total mass 1/2. The edge family holds top-edge
// order statistics; the bottom edge is its reflection and needs no second
// sample. <N_eq> = 4 e^{-beta^3/3} Int e^{beta lambda} rho_edge(lambda).
ValueSE pk_region_b_pspin(double beta, int k, const goe::EdgeFamily& family);
double neq_region_b_pspin(double beta);
IndexDistribution region_b_distribution(double beta, const goe::EdgeFamily& family);

// Region c), B = -beta/n, beta real: kappa = k/n acquires the continuous
// density p(x) = e^{beta Q_x^2} / Int_{-1}^{1} e^{beta t^2} rho_sc(t) dt on
// [0, 1], with Q_x the semicircle upper-tail quantile. Symmetric about
// x = 1/2 where it has a minimum for beta > 0 and a maximum for beta < 0;
// uniform at beta = 0. <N_eq> = 2 n e^{-beta} Int e^{beta t^2} rho_sc(t) dt.
double tilt_norm_region_c(double beta);
double density_region_c_pspin(double beta, double x);
double cdf_region_c_pspin(double beta, double kappa);
double neq_region_c_pspin(double beta, int n);
IndexDistribution region_c_distribution(double beta, int npoints);

// Region d), 0 < B <= (p-2)/p: kappa concentrates on 1/2; half of the
// spectrum is unstable. neq_region_d_pspin returns
// log<N_eq> = (n/2) log((1+B)/(1-B)) + log(4 sqrt(n) sqrt((1+B)/(pi B))).
double cdf_region_d_pspin(double B, double kappa);
double neq_region_d_pspin(double B, int n);
IndexDistribution region_d_distribution(const PSpinParams& params, int npoints);

}  // namespace pspin
}  // namespace saddlestat
