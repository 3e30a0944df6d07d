#include "saddlestat/goe.hpp"

#include <algorithm>
#include <cmath>

#include "saddlestat/errors.hpp"
#include "saddlestat/rng.hpp"
#include "saddlestat/special.hpp"
#include "saddlestat/threading.hpp"

namespace saddlestat {
namespace goe {

namespace {

void check_sampler(const GoeSampler& s) {
  if (s.n < 1) throw DomainError("GoeSampler: n < 1");
  if (!(s.variance_scale > 0.0) || !std::isfinite(s.variance_scale))
    throw DomainError("GoeSampler: variance_scale must be positive");
}

struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;
};

// Hermite beta = 1 tridiagonal model: diag ~ N(0, 2v), sub_i ~ sqrt(v) chi
// with n-1-i degrees of freedom; same eigenvalue law as the dense draw.
Tridiagonal draw_tridiagonal(const GoeSampler& s, std::int64_t index) {
  SampleRng rng(s.seed, static_cast<std::uint64_t>(index));
  const double sd_diag = std::sqrt(2.0 * s.variance_scale);
  const double sq_v = std::sqrt(s.variance_scale);
  Tridiagonal t;
  t.diag.resize(s.n);
  t.sub.resize(s.n > 1 ? s.n - 1 : 0);
  for (int i = 0; i < s.n; ++i) t.diag[i] = rng.normal(0.0, sd_diag);
  for (int i = 0; i + 1 < s.n; ++i)
    t.sub[i] = sq_v * rng.chi(static_cast<double>(s.n - 1 - i));
  return t;
}

Eigen::MatrixXd draw_dense(const GoeSampler& s, std::int64_t index) {
  SampleRng rng(s.seed, static_cast<std::uint64_t>(index));
  const double sd_diag = std::sqrt(2.0 * s.variance_scale);
  const double sd_off = std::sqrt(s.variance_scale);
  Eigen::MatrixXd m(s.n, s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = i; j < s.n; ++j) {
      const double x = rng.normal(0.0, i == j ? sd_diag : sd_off);
      m(i, j) = x;
      m(j, i) = x;
    }
  return m;
}

Eigen::VectorXd spectrum_ascending(const GoeSampler& s, std::int64_t index) {
  if (s.method == Method::Dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(draw_dense(s, index),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  const Tridiagonal t = draw_tridiagonal(s, index);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(t.diag, t.sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

constexpr double kPivMin = 1e-290;

// counts[j] = #{eigenvalues < shifts[j]} by the LDL^T Sturm recurrence,
// all shifts advanced through the matrix in one pass.
void sturm_counts(const Tridiagonal& t, const std::vector<double>& shifts,
                  std::vector<int>& counts, std::vector<double>& work) {
  const int n = static_cast<int>(t.diag.size());
  const int m = static_cast<int>(shifts.size());
  counts.assign(static_cast<std::size_t>(m), 0);
  work.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    double d = t.diag[0] - shifts[j];
    if (std::fabs(d) < kPivMin) d = -kPivMin;
    work[static_cast<std::size_t>(j)] = d;
    if (d < 0.0) ++counts[static_cast<std::size_t>(j)];
  }
  for (int r = 1; r < n; ++r) {
    const double ar = t.diag[r];
    const double b2 = t.sub[r - 1] * t.sub[r - 1];
    for (int j = 0; j < m; ++j) {
      double d = (ar - shifts[j]) - b2 / work[static_cast<std::size_t>(j)];
      if (std::fabs(d) < kPivMin) d = -kPivMin;
      work[static_cast<std::size_t>(j)] = d;
      if (d < 0.0) ++counts[static_cast<std::size_t>(j)];
    }
  }
}

// ranks[j]-th largest eigenvalues (0-based ranks) by batched bisection.
std::vector<double> tridiagonal_order_statistics(const Tridiagonal& t,
                                                 const std::vector<int>& ranks) {
  const int n = static_cast<int>(t.diag.size());
  double glo = t.diag[0], ghi = t.diag[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(t.sub[i - 1]) : 0.0) +
                     (i + 1 < n ? std::fabs(t.sub[i]) : 0.0);
    glo = std::min(glo, t.diag[i] - r);
    ghi = std::max(ghi, t.diag[i] + r);
  }
  const double tol =
      1e-11 * std::max({1.0, std::fabs(glo), std::fabs(ghi)});
  const std::size_t m = ranks.size();
  std::vector<double> lo(m, glo), hi(m, ghi), mids;
  std::vector<int> counts;
  std::vector<double> work;
  std::vector<std::size_t> active(m);
  for (std::size_t j = 0; j < m; ++j) active[j] = j;
  while (!active.empty()) {
    mids.clear();
    for (std::size_t j : active) mids.push_back(0.5 * (lo[j] + hi[j]));
    sturm_counts(t, mids, counts, work);
    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t j = active[a];
      // rank r from the top is the (n - r)-th smallest, 1-based
      if (counts[a] >= n - ranks[j]) hi[j] = mids[a];
      else lo[j] = mids[a];
      if (hi[j] - lo[j] > tol) still.push_back(j);
    }
    active.swap(still);
  }
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = 0.5 * (lo[j] + hi[j]);
  return out;
}

}  // namespace

double spectral_edge(const GoeSampler& s) {
  check_sampler(s);
  return 2.0 * std::sqrt(s.n * s.variance_scale);
}

Eigen::VectorXd sample_spectrum(const GoeSampler& s, std::int64_t index) {
  check_sampler(s);
  Eigen::VectorXd asc = spectrum_ascending(s, index);
  return asc.reverse();
}

double order_statistic(const GoeSampler& s, std::int64_t index, int k) {
  check_sampler(s);
  if (k < 0 || k >= s.n) throw DomainError("order_statistic: k outside [0, n)");
  if (s.method == Method::Dense) {
    Eigen::VectorXd asc = spectrum_ascending(s, index);
    return asc[s.n - 1 - k];
  }
  const Tridiagonal t = draw_tridiagonal(s, index);
  return tridiagonal_order_statistics(t, {k})[0];
}

std::vector<double> top_order_statistics(const GoeSampler& s, std::int64_t index,
                                         int kmax) {
  check_sampler(s);
  if (kmax < 0 || kmax >= s.n)
    throw DomainError("top_order_statistics: kmax outside [0, n)");
  if (s.method == Method::Dense) {
    Eigen::VectorXd asc = spectrum_ascending(s, index);
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) out[static_cast<std::size_t>(k)] = asc[s.n - 1 - k];
    return out;
  }
  const Tridiagonal t = draw_tridiagonal(s, index);
  std::vector<int> ranks(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) ranks[static_cast<std::size_t>(k)] = k;
  return tridiagonal_order_statistics(t, ranks);
}

double edge_rescale(double lambda, int n) {
  if (n < 1) throw DomainError("edge_rescale: n < 1");
  return (lambda - std::sqrt(2.0 * n)) * std::sqrt(2.0) *
         std::pow(static_cast<double>(n), 1.0 / 6.0);
}

double edge_rescale_inverse(double sigma, int n) {
  if (n < 1) throw DomainError("edge_rescale_inverse: n < 1");
  return std::sqrt(2.0 * n) +
         sigma / (std::sqrt(2.0) * std::pow(static_cast<double>(n), 1.0 / 6.0));
}

Transform edge_transform(int n) {
  Transform t;
  t.scale = std::sqrt(2.0) * std::pow(static_cast<double>(n), 1.0 / 6.0);
  t.shift = -std::sqrt(2.0 * n) * t.scale;
  t.kind = "edge";
  return t;
}

GaussianApprox gaussian_approx(int n, int k, Branch branch) {
  if (n < 2) throw DomainError("gaussian_approx: n < 2");
  GaussianApprox g;
  if (branch == Branch::Edge) {
    if (k < 1 || k >= n)
      throw DomainError("gaussian_approx: edge branch needs 1 <= k < n");
    const double a = 3.0 * M_PI * k / (4.0 * std::sqrt(2.0) * n);
    g.mu = std::sqrt(2.0 * n) * (1.0 - std::pow(a, 2.0 / 3.0));
    const double var = 2.0 * std::log(static_cast<double>(k)) /
                       (std::pow(static_cast<double>(n), 1.0 / 3.0) *
                        std::pow(12.0 * M_PI * k, 2.0 / 3.0));
    g.sigma = std::sqrt(var);
  } else {
    if (k < 1 || k >= n)
      throw DomainError("gaussian_approx: bulk branch needs 1 <= k < n");
    const double q = special::semicircle_quantile(static_cast<double>(k) / n);
    g.mu = q * std::sqrt(2.0 * n);
    const double var =
        std::log(static_cast<double>(n)) / (2.0 * n * (1.0 - q * q));
    g.sigma = std::sqrt(var);
  }
  return g;
}

EmpiricalDensity order_statistic_density(const GoeSampler& s, int k,
                                         const BinSpec& spec,
                                         std::int64_t n_samples, int threads,
                                         bool rescale_edge) {
  check_sampler(s);
  if (k < 0 || k >= s.n)
    throw DomainError("order_statistic_density: k outside [0, n)");
  if (n_samples < 1) throw DomainError("order_statistic_density: n_samples < 1");
  EmpiricalDensity init(spec);
  init.matrix_n = s.n;
  init.k = k;
  init.seed = s.seed;
  init.multiplicity = 1;
  if (rescale_edge) init.transform = edge_transform(s.n);
  const Transform tf = init.transform;

  auto block = [&](std::int64_t first, std::int64_t last) {
    EmpiricalDensity h = init;
    for (std::int64_t i = first; i < last; ++i) {
      const double lam = order_statistic(s, i, k);
      h.add(tf.scale * lam + tf.shift);
    }
    h.n_samples = last - first;
    return h;
  };
  auto fold = [](EmpiricalDensity& acc, const EmpiricalDensity& part) {
    acc.merge(part);
  };
  return parallel_blocks<EmpiricalDensity>(n_samples, threads, block, fold, init);
}

SpectrumFamily spectrum_family(const GoeSampler& s, const BinSpec& spec,
                               std::int64_t n_samples, int threads) {
  check_sampler(s);
  if (n_samples < 1) throw DomainError("spectrum_family: n_samples < 1");
  SpectrumFamily init;
  init.per_k.assign(static_cast<std::size_t>(s.n), EmpiricalDensity(spec));
  init.total = EmpiricalDensity(spec);
  for (int k = 0; k < s.n; ++k) {
    auto& h = init.per_k[static_cast<std::size_t>(k)];
    h.matrix_n = s.n;
    h.k = k;
    h.seed = s.seed;
  }
  init.total.matrix_n = s.n;
  init.total.k = -1;
  init.total.seed = s.seed;
  init.total.multiplicity = s.n;

  auto block = [&](std::int64_t first, std::int64_t last) {
    SpectrumFamily f = init;
    for (std::int64_t i = first; i < last; ++i) {
      const Eigen::VectorXd lam = sample_spectrum(s, i);
      for (int k = 0; k < s.n; ++k) {
        f.per_k[static_cast<std::size_t>(k)].add(lam[k]);
        f.total.add(lam[k]);
      }
    }
    const std::int64_t m = last - first;
    for (auto& h : f.per_k) h.n_samples = m;
    f.total.n_samples = m;
    return f;
  };
  auto fold = [](SpectrumFamily& acc, const SpectrumFamily& part) {
    for (std::size_t k = 0; k < acc.per_k.size(); ++k)
      acc.per_k[k].merge(part.per_k[k]);
    acc.total.merge(part.total);
  };
  return parallel_blocks<SpectrumFamily>(n_samples, threads, block, fold, init);
}

EdgeFamily edge_family(const GoeSampler& s, int kmax, const BinSpec& spec_sigma,
                       std::int64_t n_samples, int threads) {
  check_sampler(s);
  if (kmax < 0 || kmax >= s.n) throw DomainError("edge_family: kmax outside [0, n)");
  if (n_samples < 1) throw DomainError("edge_family: n_samples < 1");
  const Transform tf = edge_transform(s.n);
  EdgeFamily init;
  init.per_k.assign(static_cast<std::size_t>(kmax) + 1,
                    EmpiricalDensity(spec_sigma));
  for (int k = 0; k <= kmax; ++k) {
    auto& h = init.per_k[static_cast<std::size_t>(k)];
    h.matrix_n = s.n;
    h.k = k;
    h.seed = s.seed;
    h.transform = tf;
  }

  auto block = [&](std::int64_t first, std::int64_t last) {
    EdgeFamily f = init;
    for (std::int64_t i = first; i < last; ++i) {
      const std::vector<double> top = top_order_statistics(s, i, kmax);
      for (int k = 0; k <= kmax; ++k)
        f.per_k[static_cast<std::size_t>(k)].add(tf.scale * top[static_cast<std::size_t>(k)] +
                                                 tf.shift);
    }
    for (auto& h : f.per_k) h.n_samples = last - first;
    return f;
  };
  auto fold = [](EdgeFamily& acc, const EdgeFamily& part) {
    for (std::size_t k = 0; k < acc.per_k.size(); ++k)
      acc.per_k[k].merge(part.per_k[k]);
  };
  return parallel_blocks<EdgeFamily>(n_samples, threads, block, fold, init);
}

}  // namespace goe
}  // namespace saddlestat
