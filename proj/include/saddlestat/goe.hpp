#pragma once

// GOE spectral sampling. The sampler is convention-agnostic through
// variance_scale = v: off-diagonal variance v, diagonal 2v, eigenvalue weight
// exp(-Tr M^2 / (4v)), mean spectral edge at 2 sqrt(n v). The model modules
// fix v = 1/2 (edge at sqrt(2 n)); the dual-MC relation check re-scales v to
// match its matrix-weight convention.
//
// Draws are counter-based: everything about sample `index` depends only on
// (seed, index), so results are independent of thread scheduling.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "saddlestat/histogram.hpp"

namespace saddlestat {
namespace goe {

enum class Method { Dense, Tridiagonal };

struct GoeSampler {
  int n = 1;
  double variance_scale = 0.5;
  Method method = Method::Tridiagonal;
  std::uint64_t seed = 0;
};

double spectral_edge(const GoeSampler& s);

// Full spectrum of draw `index`, sorted descending.
Eigen::VectorXd sample_spectrum(const GoeSampler& s, std::int64_t index);

// (k+1)-th largest eigenvalue of draw `index`; tridiagonal path resolves the
// single order statistic by Sturm-count bisection without a full solve.
double order_statistic(const GoeSampler& s, std::int64_t index, int k);

// k = 0..kmax largest eigenvalues of draw `index`, descending.
std::vector<double> top_order_statistics(const GoeSampler& s, std::int64_t index,
                                         int kmax);

// soft-edge zoom sigma = (lambda - sqrt(2 n)) sqrt(2) n^{1/6} (v = 1/2 units)
double edge_rescale(double lambda, int n);
double edge_rescale_inverse(double sigma, int n);
Transform edge_transform(int n);

enum class Branch { Edge, Bulk };

struct GaussianApprox {
  double mu = 0.0;
  double sigma = 0.0;  // standard deviation
};

// Order-statistic location/width approximation in v = 1/2 units.
// Edge branch: mu_k = sqrt(2n) (1 - (3 pi k / (4 sqrt(2) n))^{2/3}),
//              sigma_k^2 = 2 log k / (n^{1/3} (12 pi k)^{2/3}), valid k >= 1.
// Bulk branch: mu_k = Q_{k/n} sqrt(2n), sigma_k^2 = log n / (2n (1 - Q^2)).
GaussianApprox gaussian_approx(int n, int k, Branch branch);

// Histogram of a single order statistic (optionally edge-rescaled).
EmpiricalDensity order_statistic_density(const GoeSampler& s, int k,
                                         const BinSpec& spec,
                                         std::int64_t n_samples, int threads = 1,
                                         bool rescale_edge = false);

// Per-k histograms for every k plus the stacked spectrum, sharing draws, so
// sum_k counts_k == counts_total bin by bin.
struct SpectrumFamily {
  std::vector<EmpiricalDensity> per_k;
  EmpiricalDensity total;
};
SpectrumFamily spectrum_family(const GoeSampler& s, const BinSpec& spec,
                               std::int64_t n_samples, int threads = 1);

// Edge-rescaled histograms of the top kmax+1 eigenvalues, sharing draws.
struct EdgeFamily {
  std::vector<EmpiricalDensity> per_k;
};
EdgeFamily edge_family(const GoeSampler& s, int kmax, const BinSpec& spec_sigma,
                       std::int64_t n_samples, int threads = 1);

}  // namespace goe
}  // namespace saddlestat
