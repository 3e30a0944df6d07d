#include "saddlestat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "saddlestat/constrained.hpp"
#include "saddlestat/errors.hpp"
#include "saddlestat/histogram.hpp"
#include "saddlestat/landscape.hpp"
#include "saddlestat/pspin.hpp"
#include "saddlestat/rng.hpp"
#include "saddlestat/special.hpp"
#include "saddlestat/stats.hpp"
#include "saddlestat/threading.hpp"

namespace saddlestat {
namespace verify {

namespace {

// Disjoint seed stream for the second side of a dual-MC check.
constexpr std::uint64_t kSeedOffset = 0x9e3779b97f4a7c15ULL;

constexpr double kInvSqrt4Pi = 0.28209479177387814;  // sqrt(1 / (4 pi))

double silverman_bandwidth(const std::vector<double>& samples) {
  MomentAccumulator acc;
  for (double x : samples) acc.add(x);
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t s = sorted.size();
  const double q1 = sorted[s / 4], q3 = sorted[(3 * s) / 4];
  const double spread = std::min(acc.sd(), (q3 - q1) / 1.34);
  if (!(spread > 0.0))
    throw CoverageError("silverman_bandwidth: degenerate sample spread");
  return 0.9 * spread * std::pow(static_cast<double>(s), -0.2);
}

double kde_value(const std::vector<double>& samples, double h, double x) {
  double sum = 0.0;
  for (double xi : samples) {
    const double u = (x - xi) / h;
    if (std::abs(u) < 8.0) sum += std::exp(-0.5 * u * u);
  }
  const double norm = static_cast<double>(samples.size()) * h *
                      std::sqrt(2.0 * M_PI);
  return sum / norm;
}

void validate_settings(const McSettings& s) {
  if (s.n_samples < 2) throw DomainError("verify: n_samples must be >= 2");
  if (s.threads < 1) throw DomainError("verify: threads must be >= 1");
}

// The joint eigenvalue density of the m-dim unit-weight ensemble is known in
// closed form including its normalization,
//   p(l) = (1/Z_m) prod_{i<j} |l_i - l_j| exp(-sum_i l_i^2 / 2),
//   Z_m = (2 pi)^{m/2} prod_{j=1}^m Gamma(1 + j/2) / Gamma(3/2),
// so draws from any explicit proposal reweight exactly. When the evaluation
// point sits in a tail that plain sampling cannot populate, the density is
// estimated from a proposal that pins the conditioned coordinate there: an
// equal-weight mixture over all coordinate orders of independent Gaussians
// centered on the conditional mode of log p.

double log_z_mehta(int m) {
  double s = 0.5 * m * std::log(2.0 * M_PI) - m * special::log_gamma(1.5);
  for (int j = 1; j <= m; ++j) s += special::log_gamma(1.0 + 0.5 * j);
  return s;
}

double log_joint_eigen(const std::vector<double>& l, double log_z) {
  double s = -log_z;
  const int m = static_cast<int>(l.size());
  for (int i = 0; i < m; ++i) {
    s -= 0.5 * l[i] * l[i];
    for (int j = i + 1; j < m; ++j) {
      const double d = std::abs(l[i] - l[j]);
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      s += std::log(d);
    }
  }
  return s;
}

// Conditional mode of log p with the (k+1)-th sorted coordinate held at y:
// capped-step gradient ascent with re-sorting and re-pinning each step.
std::vector<double> conditional_mode(int m, int k, double y) {
  std::vector<double> l(static_cast<std::size_t>(m));
  const double scale = std::sqrt(2.0 * m);
  for (int i = 0; i < m; ++i)
    l[static_cast<std::size_t>(i)] =
        scale * special::semicircle_quantile(1.0 - (i + 0.5) / m);
  l[static_cast<std::size_t>(k)] = y;
  std::sort(l.begin(), l.end(), std::greater<double>());
  for (int it = 0; it < 400; ++it) {
    std::vector<double> g(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double gi = -l[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j)
        if (j != i)
          gi += 1.0 / (l[static_cast<std::size_t>(i)] -
                       l[static_cast<std::size_t>(j)]);
      g[static_cast<std::size_t>(i)] = std::clamp(0.05 * gi, -0.05, 0.05);
    }
    for (int i = 0; i < m; ++i)
      if (i != k) l[static_cast<std::size_t>(i)] += g[static_cast<std::size_t>(i)];
    std::sort(l.begin(), l.end(), std::greater<double>());
    l[static_cast<std::size_t>(k)] = y;
  }
  return l;
}

// Permanent of the kernel matrix by Ryser's formula with per-row log scaling;
// returns log perm.
double log_permanent(const std::vector<double>& log_k, int m) {
  std::vector<double> row_max(static_cast<std::size_t>(m),
                              -std::numeric_limits<double>::infinity());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      row_max[static_cast<std::size_t>(i)] =
          std::max(row_max[static_cast<std::size_t>(i)],
                   log_k[static_cast<std::size_t>(i * m + j)]);
  std::vector<double> a(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      a[static_cast<std::size_t>(i * m + j)] =
          std::exp(log_k[static_cast<std::size_t>(i * m + j)] -
                   row_max[static_cast<std::size_t>(i)]);
  double sum = 0.0;
  const int full = 1 << m;
  for (int mask = 1; mask < full; ++mask) {
    double prod = 1.0;
    for (int i = 0; i < m; ++i) {
      double rs = 0.0;
      for (int j = 0; j < m; ++j)
        if (mask & (1 << j)) rs += a[static_cast<std::size_t>(i * m + j)];
      prod *= rs;
    }
    const int bits = __builtin_popcount(static_cast<unsigned>(mask));
    sum += ((m - bits) % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  if (!(sum > 0.0)) return -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double r : row_max) scale += r;
  return std::log(sum) + scale;
}

struct TiltedDensity {
  PointDensity pd;
  double ess = 0.0;
  double weight_sum = 0.0;
};

TiltedDensity tilted_density_at_point(int m, int k, double y,
                                      std::uint64_t seed,
                                      std::int64_t n_samples, int threads) {
  if (m > 6)
    throw CoverageError(
        "tilted_density_at_point: tail estimation supports dimension <= 6");
  const std::vector<double> mu = conditional_mode(m, k, y);
  std::vector<double> sd(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double curv = 1.0;
    for (int j = 0; j < m; ++j)
      if (j != i) {
        const double d = mu[static_cast<std::size_t>(i)] -
                         mu[static_cast<std::size_t>(j)];
        curv += 1.0 / (d * d);
      }
    sd[static_cast<std::size_t>(i)] =
        std::clamp(1.3 / std::sqrt(curv), 0.05, 0.6);
  }
  const double log_z = log_z_mehta(m);
  double log_fact = 0.0;
  for (int j = 2; j <= m; ++j) log_fact += std::log(static_cast<double>(j));
  const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);

  std::vector<double> xs(static_cast<std::size_t>(n_samples));
  std::vector<double> ws(static_cast<std::size_t>(n_samples));
  parallel_blocks<int>(
      n_samples, threads,
      [&](std::int64_t first, std::int64_t last) {
        std::vector<double> l(static_cast<std::size_t>(m));
        std::vector<int> perm(static_cast<std::size_t>(m));
        std::vector<double> log_k(static_cast<std::size_t>(m * m));
        for (std::int64_t idx = first; idx < last; ++idx) {
          SampleRng rng(seed, static_cast<std::uint64_t>(idx));
          for (int i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = i;
          for (int i = m - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform() * (i + 1));
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(std::min(j, i))]);
          }
          for (int i = 0; i < m; ++i) {
            const int c = perm[static_cast<std::size_t>(i)];
            l[static_cast<std::size_t>(i)] =
                rng.normal(mu[static_cast<std::size_t>(c)],
                           sd[static_cast<std::size_t>(c)]);
          }
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
              const double u = (l[static_cast<std::size_t>(i)] -
                                mu[static_cast<std::size_t>(j)]) /
                               sd[static_cast<std::size_t>(j)];
              log_k[static_cast<std::size_t>(i * m + j)] =
                  -0.5 * u * u - std::log(sd[static_cast<std::size_t>(j)]) -
                  half_log_2pi;
            }
          const double log_g = log_permanent(log_k, m) - log_fact;
          const double log_w = log_joint_eigen(l, log_z) - log_g;
          std::vector<double> sorted(l);
          std::sort(sorted.begin(), sorted.end(), std::greater<double>());
          xs[static_cast<std::size_t>(idx)] = sorted[static_cast<std::size_t>(k)];
          ws[static_cast<std::size_t>(idx)] = std::exp(log_w);
        }
        return 0;
      },
      [](int&, const int&) {}, 0);

  double wsum = 0.0, w2sum = 0.0;
  for (double w : ws) { wsum += w; w2sum += w * w; }
  if (!(w2sum > 0.0))
    throw CoverageError("tilted_density_at_point: all weights vanished");
  TiltedDensity out;
  out.ess = wsum * wsum / w2sum;
  out.weight_sum = wsum;
  if (out.ess < 500.0)
    throw CoverageError("tilted_density_at_point: importance weights collapsed");

  double mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mean += ws[i] * xs[i];
  mean /= wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    var += ws[i] * (xs[i] - mean) * (xs[i] - mean);
  var /= wsum;
  if (!(var > 0.0))
    throw CoverageError("tilted_density_at_point: degenerate sample spread");
  const double h = 0.9 * std::sqrt(var) * std::pow(out.ess, -0.2);
  out.pd.bandwidth = h;

  const double s = static_cast<double>(n_samples);
  double kde = 0.0, kde2 = 0.0, binned = 0.0, bin2 = 0.0;
  std::int64_t bin_count = 0;
  const double knorm = 1.0 / (h * std::sqrt(2.0 * M_PI));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double u = (xs[i] - y) / h;
    if (std::abs(u) < 8.0) {
      const double t = ws[i] * knorm * std::exp(-0.5 * u * u);
      kde += t;
      kde2 += t * t;
    }
    if (std::abs(xs[i] - y) <= 0.5 * h) {
      const double t = ws[i] / h;
      binned += t;
      bin2 += t * t;
      ++bin_count;
    }
  }
  if (bin_count == 0) {
    std::ostringstream msg;
    msg << "tilted_density_at_point: no samples within half a bandwidth of "
        << y;
    throw CoverageError(msg.str());
  }
  out.pd.kde = kde / s;
  out.pd.se_kde = std::sqrt(kde2) / s;
  out.pd.binned = binned / s;
  out.pd.se_binned = std::sqrt(bin2) / s;
  const double denom = std::sqrt(out.pd.se_kde * out.pd.se_kde +
                                 out.pd.se_binned * out.pd.se_binned);
  out.pd.agreement_z =
      denom > 0.0 ? (out.pd.kde - out.pd.binned) / denom : 0.0;
  return out;
}

std::vector<double> collect_order_statistics(const goe::GoeSampler& gs, int k,
                                             std::int64_t n_samples,
                                             int threads) {
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  parallel_blocks<int>(
      n_samples, threads,
      [&](std::int64_t first, std::int64_t last) {
        for (std::int64_t i = first; i < last; ++i)
          out[static_cast<std::size_t>(i)] = goe::order_statistic(gs, i, k);
        return 0;
      },
      [](int&, const int&) {}, 0);
  return out;
}

// Kernel mode on a fixed grid spanning the central 98% of the sample.
double kde_mode(const std::vector<double>& samples, double h) {
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t s = sorted.size();
  const double lo = sorted[s / 100] - h, hi = sorted[s - 1 - s / 100] + h;
  const int grid = 512;
  double best_x = lo, best_f = -1.0;
  for (int g = 0; g <= grid; ++g) {
    const double x = lo + (hi - lo) * g / grid;
    const double f = kde_value(sorted, h, x);
    if (f > best_f) { best_f = f; best_x = x; }
  }
  return best_x;
}

// Sampling window and bin count for the exact-count quadratures, matching
// the scales the model modules were validated at.
BinSpec count_window(int n, bool wide) {
  const double edge = std::sqrt(2.0 * (n + 1.0));
  const double half = (wide ? 1.6 : 1.45) * edge;
  int nbins;
  if (wide) {
    nbins = 60 + 5 * n;
  } else {
    nbins = std::clamp(static_cast<int>(2.0 * half / 0.18), 80, 400);
  }
  return BinSpec{-half, half, nbins};
}

struct SequencePoint {
  double value = 0.0;
  double se = 0.0;
};

double require_param(const ConvergenceSpec& spec, const std::string& key) {
  for (const auto& kv : spec.params)
    if (kv.first == key) return kv.second;
  throw DomainError("check_regime_convergence: missing parameter " + key);
}

// Cumulative count fraction sum_{j<=kk} <N_j> / <N_eq> from one shared
// spectrum family, with the per-level log errors folded in quadrature.
SequencePoint cumulative_fraction(const goe::SpectrumFamily& fam, int kk,
                                  const std::function<landscape::MeanCount(
                                      const EmpiricalDensity&)>& level_count,
                                  const landscape::MeanCount& total) {
  std::vector<double> logs(static_cast<std::size_t>(kk) + 1);
  std::vector<double> ses(static_cast<std::size_t>(kk) + 1);
  for (int j = 0; j <= kk; ++j) {
    const landscape::MeanCount mc = level_count(fam.per_k[static_cast<std::size_t>(j)]);
    logs[static_cast<std::size_t>(j)] = mc.log_value;
    ses[static_cast<std::size_t>(j)] = mc.se_log;
  }
  const double log_num = logsumexp(logs);
  double num_var = 0.0;
  for (std::size_t j = 0; j < logs.size(); ++j) {
    const double w = std::exp(logs[j] - log_num);
    num_var += w * w * ses[j] * ses[j];
  }
  SequencePoint pt;
  pt.value = std::exp(log_num - total.log_value);
  pt.se = pt.value * std::sqrt(num_var + total.se_log * total.se_log);
  return pt;
}

}  // namespace

void CheckReport::push(const std::string& key, double value) {
  metadata.emplace_back(key, value);
}

std::string CheckReport::to_json_line() const {
  nlohmann::ordered_json j;
  j["check_name"] = check_name;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["stderr_lhs"] = stderr_lhs;
  j["stderr_rhs"] = stderr_rhs;
  j["z_score"] = z_score;
  j["pass"] = pass;
  j["status"] = status;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& kv : metadata) meta[kv.first] = kv.second;
  j["metadata"] = meta;
  return j.dump();
}

PointDensity density_at_point(const std::vector<double>& samples, double x) {
  if (samples.size() < 16)
    throw DomainError("density_at_point: too few samples");
  PointDensity pd;
  pd.bandwidth = silverman_bandwidth(samples);
  const double s = static_cast<double>(samples.size());

  pd.kde = kde_value(samples, pd.bandwidth, x);
  // asymptotic kernel variance f * R(K) / (S h), R(Gauss) = 1 / (2 sqrt(pi))
  pd.se_kde = std::sqrt(pd.kde * kInvSqrt4Pi / (s * pd.bandwidth));

  const double w = pd.bandwidth;
  std::int64_t count = 0;
  for (double xi : samples)
    if (std::abs(xi - x) <= 0.5 * w) ++count;
  if (count == 0) {
    std::ostringstream msg;
    msg << "density_at_point: no samples within half a bandwidth of " << x;
    throw CoverageError(msg.str());
  }
  pd.binned = static_cast<double>(count) / (s * w);
  pd.se_binned = std::sqrt(static_cast<double>(count)) / (s * w);

  const double denom =
      std::sqrt(pd.se_kde * pd.se_kde + pd.se_binned * pd.se_binned);
  pd.agreement_z = denom > 0.0 ? (pd.kde - pd.binned) / denom : 0.0;
  return pd;
}

CheckReport check_relation(int n, int k, double z, double mu_c,
                           const McSettings& s) {
  if (n < 1) throw DomainError("check_relation: n must be >= 1");
  if (k < 0 || k > n) throw DomainError("check_relation: k must lie in [0, n]");
  if (!(mu_c > 0.0)) throw DomainError("check_relation: mu_c must be positive");
  validate_settings(s);

  // Matrix side: weight exp(-n Tr M^2 / (4 mu_c^2)) is variance_scale
  // mu_c^2 / n; the mean runs over all draws with the index condition as an
  // indicator.
  goe::GoeSampler left{n, mu_c * mu_c / n, goe::Method::Tridiagonal, s.seed};
  MomentAccumulator det_acc;
  std::int64_t matched = 0;
  {
    struct Acc { MomentAccumulator m; std::int64_t hits = 0; };
    Acc total = parallel_blocks<Acc>(
        s.n_samples, s.threads,
        [&](std::int64_t first, std::int64_t last) {
          Acc a;
          for (std::int64_t i = first; i < last; ++i) {
            const Eigen::VectorXd ev = goe::sample_spectrum(left, i);
            int above = 0;
            for (int j = 0; j < n; ++j)
              if (ev[j] > z) ++above;
            if (above != k) { a.m.add(0.0); continue; }
            double det = 1.0;
            for (int j = 0; j < n; ++j) det *= std::abs(z - ev[j]);
            a.m.add(det);
            ++a.hits;
          }
          return a;
        },
        [](Acc& t, const Acc& p) { t.m.merge(p.m); t.hits += p.hits; }, Acc{});
    det_acc = total.m;
    matched = total.hits;
  }

  // Spectral side: order-statistic density of the (n+1)-dim unit-weight
  // ensemble at the rescaled point, from an independent stream. A plain
  // pilot projects the occupancy of the cross-check bin at full size; a
  // starved point falls back to the reweighted tail estimator.
  goe::GoeSampler right{n + 1, 0.5, goe::Method::Tridiagonal,
                        s.seed + kSeedOffset};
  const double y = z * std::sqrt(n / (2.0 * mu_c * mu_c));
  const std::int64_t pilot_n = std::min<std::int64_t>(s.n_samples, 20000);
  const std::vector<double> pilot =
      collect_order_statistics(right, k, pilot_n, s.threads);
  MomentAccumulator pilot_acc;
  for (double x : pilot) pilot_acc.add(x);
  const double h_proj =
      0.9 * pilot_acc.sd() * std::pow(static_cast<double>(s.n_samples), -0.2);
  std::int64_t pilot_hits = 0;
  for (double x : pilot)
    if (std::abs(x - y) <= 0.5 * h_proj) ++pilot_hits;
  const double projected = static_cast<double>(pilot_hits) *
                           static_cast<double>(s.n_samples) /
                           static_cast<double>(pilot_n);

  PointDensity pd;
  double ess = 0.0;
  bool tilted = false;
  if (projected >= 25.0) {
    const std::vector<double> ys =
        collect_order_statistics(right, k, s.n_samples, s.threads);
    pd = density_at_point(ys, y);
    ess = static_cast<double>(s.n_samples);
  } else {
    tilted = true;
    const TiltedDensity td = tilted_density_at_point(
        n + 1, k, y, s.seed + 3 * kSeedOffset, s.n_samples, s.threads);
    pd = td.pd;
    ess = td.ess;
  }

  const double log_pref = 0.5 * std::log(2.0) +
                          0.5 * n * std::log(2.0 / n) + n * std::log(mu_c) +
                          special::log_gamma(0.5 * (n + 1.0)) +
                          n * z * z / (4.0 * mu_c * mu_c);
  const double pref = std::exp(log_pref);

  CheckReport r;
  r.check_name = "relation";
  r.lhs = det_acc.mean;
  r.stderr_lhs = det_acc.stderr_mean();
  r.rhs = pref * pd.kde;
  r.stderr_rhs = pref * pd.se_kde;
  const double denom =
      std::sqrt(r.stderr_lhs * r.stderr_lhs + r.stderr_rhs * r.stderr_rhs);
  r.z_score = denom > 0.0 ? (r.lhs - r.rhs) / denom : 0.0;
  r.pass = std::abs(r.z_score) <= 3.0 && std::abs(pd.agreement_z) <= 3.0;
  r.status = r.pass ? "pass" : "fail";
  r.push("n", n);
  r.push("k", k);
  r.push("z", z);
  r.push("mu_c", mu_c);
  r.push("samples", static_cast<double>(s.n_samples));
  r.push("seed", static_cast<double>(s.seed));
  r.push("theta_fraction",
         static_cast<double>(matched) / static_cast<double>(s.n_samples));
  r.push("bandwidth", pd.bandwidth);
  r.push("rhs_binned", pref * pd.binned);
  r.push("density_agreement_z", pd.agreement_z);
  r.push("tilted_estimator", tilted ? 1.0 : 0.0);
  r.push("effective_samples", ess);
  return r;
}

CheckReport check_tw_approx(int n, int k, const McSettings& s) {
  if (n < 500) throw DomainError("check_tw_approx: n must be >= 500");
  if (k < 0 || k > 4) throw DomainError("check_tw_approx: k must lie in [0, 4]");
  validate_settings(s);

  CheckReport r;
  r.check_name = "tw-approx";
  r.push("n", n);
  r.push("k", k);
  r.push("samples", static_cast<double>(s.n_samples));
  r.push("seed", static_cast<double>(s.seed));
  if (s.n_samples < 4000) {
    r.status = "inconclusive";
    r.push("required_samples", 4000.0);
    return r;
  }

  goe::GoeSampler a{n, 0.5, goe::Method::Tridiagonal, s.seed};
  goe::GoeSampler b{2 * n, 0.5, goe::Method::Tridiagonal, s.seed + kSeedOffset};
  std::vector<double> xa =
      collect_order_statistics(a, k, s.n_samples, s.threads);
  std::vector<double> xb =
      collect_order_statistics(b, k, s.n_samples, s.threads);
  for (double& x : xa) x = goe::edge_rescale(x, n);
  for (double& x : xb) x = goe::edge_rescale(x, 2 * n);

  const double ks = ks_statistic(xa, xb);
  const double crit = ks_critical(xa.size(), xb.size(), 0.01);
  const double ha = silverman_bandwidth(xa), hb = silverman_bandwidth(xb);
  const double mode_a = kde_mode(xa, ha), mode_b = kde_mode(xb, hb);
  double below4 = 0.0;
  for (double x : xa)
    if (x <= 4.0) below4 += 1.0;
  below4 /= static_cast<double>(xa.size());

  r.lhs = mode_a;
  r.rhs = mode_b;
  r.stderr_lhs = ha;
  r.stderr_rhs = hb;
  r.z_score = 3.0 * ks / crit;
  r.pass = ks <= crit && std::abs(mode_a - mode_b) <= 0.1 && below4 >= 0.995;
  r.status = r.pass ? "pass" : "fail";
  r.push("ks", ks);
  r.push("ks_critical", crit);
  r.push("cdf_at_4", below4);
  return r;
}

CheckReport check_edge_partition(int n, int kmax, const McSettings& s) {
  if (n < 100) throw DomainError("check_edge_partition: n must be >= 100");
  if (kmax < 0 || kmax > 8)
    throw DomainError("check_edge_partition: kmax must lie in [0, 8]");
  validate_settings(s);

  // Window where levels beyond kmax contribute negligibly; bins with fewer
  // than ten expected counts are skipped at both ends.
  const BinSpec spec{-2.0, 3.5, 28};
  goe::GoeSampler gs{n, 0.5, goe::Method::Tridiagonal, s.seed};
  const goe::EdgeFamily fam =
      goe::edge_family(gs, kmax, spec, s.n_samples, s.threads);

  const double w = (spec.hi - spec.lo) / spec.nbins;
  const double draws = static_cast<double>(s.n_samples);
  int compared = 0;
  double worst_z = 0.0, worst_obs = 0.0, worst_exp = 0.0;
  for (int i = 0; i < spec.nbins; ++i) {
    const double sigma = spec.lo + (i + 0.5) * w;
    const double expected = draws * w * special::rho_edge(sigma);
    if (expected < 10.0) continue;
    double obs = 0.0;
    for (const auto& d : fam.per_k)
      obs += static_cast<double>(d.count(i));
    const double zb = (obs - expected) / std::sqrt(expected);
    ++compared;
    if (std::abs(zb) > std::abs(worst_z)) {
      worst_z = zb;
      worst_obs = obs / (draws * w);
      worst_exp = expected / (draws * w);
    }
  }
  if (compared == 0)
    throw CoverageError("check_edge_partition: no bin has enough mass");

  CheckReport r;
  r.check_name = "edge-partition";
  r.lhs = worst_obs;
  r.rhs = worst_exp;
  r.stderr_lhs = std::sqrt(worst_exp / (draws * w));
  r.stderr_rhs = 0.0;
  r.z_score = worst_z;
  const double threshold = z_threshold(compared);
  r.pass = std::abs(worst_z) <= threshold;
  r.status = r.pass ? "pass" : "fail";
  r.push("n", n);
  r.push("kmax", kmax);
  r.push("samples", static_cast<double>(s.n_samples));
  r.push("seed", static_cast<double>(s.seed));
  r.push("bins_compared", compared);
  r.push("z_threshold", threshold);
  return r;
}

CheckReport check_gaussian_approx(int n, int k, goe::Branch branch,
                                  const McSettings& s) {
  if (n < 2) throw DomainError("check_gaussian_approx: n must be >= 2");
  if (k < 0 || k >= n)
    throw DomainError("check_gaussian_approx: k must lie in [0, n)");
  validate_settings(s);

  const goe::GaussianApprox ga = goe::gaussian_approx(n, k, branch);
  goe::GoeSampler gs{n, 0.5, goe::Method::Tridiagonal, s.seed};
  MomentAccumulator acc = parallel_blocks<MomentAccumulator>(
      s.n_samples, s.threads,
      [&](std::int64_t first, std::int64_t last) {
        MomentAccumulator a;
        for (std::int64_t i = first; i < last; ++i)
          a.add(goe::order_statistic(gs, i, k));
        return a;
      },
      [](MomentAccumulator& t, const MomentAccumulator& p) { t.merge(p); },
      MomentAccumulator{});

  CheckReport r;
  r.check_name = "gaussian-approx";
  r.lhs = acc.mean;
  r.rhs = ga.mu;
  r.stderr_lhs = acc.stderr_mean();
  r.stderr_rhs = ga.sigma;
  const double denom = std::sqrt(ga.sigma * ga.sigma +
                                 r.stderr_lhs * r.stderr_lhs);
  r.z_score = denom > 0.0 ? (acc.mean - ga.mu) / denom : 0.0;
  r.pass = std::abs(r.z_score) <= 3.0;
  r.status = r.pass ? "pass" : "fail";
  const double sd = acc.sd();
  const double var_se = acc.variance() *
                        std::sqrt(2.0 / static_cast<double>(s.n_samples - 1));
  r.push("n", n);
  r.push("k", k);
  r.push("branch", branch == goe::Branch::Edge ? 0.0 : 1.0);
  r.push("samples", static_cast<double>(s.n_samples));
  r.push("seed", static_cast<double>(s.seed));
  r.push("sample_sd", sd);
  r.push("var_ratio", ga.sigma > 0.0 ? sd * sd / (ga.sigma * ga.sigma) : 0.0);
  r.push("z_var", var_se > 0.0
                      ? (acc.variance() - ga.sigma * ga.sigma) / var_se
                      : 0.0);
  return r;
}

CheckReport check_regime_convergence(const ConvergenceSpec& spec,
                                     const McSettings& s) {
  validate_settings(s);
  if (spec.n_list.size() < 2)
    throw DomainError("check_regime_convergence: need at least two n values");
  for (std::size_t i = 1; i < spec.n_list.size(); ++i)
    if (spec.n_list[i] <= spec.n_list[i - 1])
      throw DomainError("check_regime_convergence: n_list must ascend");

  CheckReport r;
  r.check_name = "regime-convergence";
  for (const auto& kv : spec.params) r.push(kv.first, kv.second);
  r.push("samples", static_cast<double>(s.n_samples));
  r.push("seed", static_cast<double>(s.seed));

  std::vector<SequencePoint> dd;
  for (std::size_t i = 0; i < spec.n_list.size(); ++i) {
    const int n = spec.n_list[i];
    const std::uint64_t seed_n = s.seed + kSeedOffset * (i + 1);
    SequencePoint pt;

    if (spec.model == "landscape" && spec.regime == "simplicity") {
      const double m = require_param(spec, "m");
      goe::GoeSampler gs{n + 1, 0.5, goe::Method::Tridiagonal, seed_n};
      const goe::SpectrumFamily fam = goe::spectrum_family(
          gs, count_window(n, false), s.n_samples, s.threads);
      const landscape::LandscapeParams p{m, n};
      const landscape::MeanCount n0 = landscape::mean_nk_exact(p, fam.per_k[0]);
      const landscape::MeanCount ne = landscape::mean_neq_exact(p, fam.total);
      const double p0 = std::exp(n0.log_value - ne.log_value);
      pt.value = 1.0 - p0;
      pt.se = p0 * std::sqrt(n0.se_log * n0.se_log + ne.se_log * ne.se_log);
    } else if (spec.model == "landscape" && spec.regime == "toppling") {
      const double delta = require_param(spec, "delta");
      const double kappa = require_param(spec, "kappa");
      const double m = 1.0 + delta / std::sqrt(static_cast<double>(n));
      const int kk = static_cast<int>(kappa * std::pow(n, 0.75));
      const double kappa_eff = kk / std::pow(n, 0.75);
      goe::GoeSampler gs{n + 1, 0.5, goe::Method::Tridiagonal, seed_n};
      const goe::SpectrumFamily fam = goe::spectrum_family(
          gs, count_window(n, false), s.n_samples, s.threads);
      const landscape::LandscapeParams p{m, n};
      const landscape::MeanCount ne = landscape::mean_neq_exact(p, fam.total);
      const SequencePoint cum = cumulative_fraction(
          fam, kk,
          [&](const EmpiricalDensity& d) {
            return landscape::mean_nk_exact(p, d);
          },
          ne);
      pt.value = std::abs(cum.value - landscape::toppling_cdf(delta, kappa_eff));
      pt.se = cum.se;
      r.push("kappa_eff_" + std::to_string(i), kappa_eff);
    } else if (spec.model == "constrained" && spec.regime == "complexity") {
      const double m = require_param(spec, "m");
      const double eps0 = require_param(spec, "eps0");
      const double q = require_param(spec, "q");
      const double kappa = require_param(spec, "kappa");
      const int kk = static_cast<int>(kappa * n);
      const double kappa_eff = static_cast<double>(kk) / n;
      goe::GoeSampler gs{n + 1, 0.5, goe::Method::Tridiagonal, seed_n};
      const goe::SpectrumFamily fam = goe::spectrum_family(
          gs, count_window(n, false), s.n_samples, s.threads);
      const constrained::ConstrainedParams p{m, eps0, q, n};
      const landscape::MeanCount ne =
          constrained::mean_neq_exact_constrained(p, fam.total);
      const SequencePoint cum = cumulative_fraction(
          fam, kk,
          [&](const EmpiricalDensity& d) {
            return constrained::mean_nk_exact_constrained(p, d);
          },
          ne);
      pt.value = std::abs(
          cum.value -
          constrained::complexity_cdf_constrained(m, eps0, q, kappa_eff));
      pt.se = cum.se;
      r.push("kappa_eff_" + std::to_string(i), kappa_eff);
    } else if (spec.model == "pspin" && spec.regime == "region-a") {
      const double B = require_param(spec, "B");
      goe::GoeSampler gs{n + 1, 0.5, goe::Method::Tridiagonal, seed_n};
      const goe::SpectrumFamily fam = goe::spectrum_family(
          gs, count_window(n, true), s.n_samples, s.threads);
      const landscape::MeanCount ne =
          pspin::mean_neq_pspin(B, n, fam.total);
      const double val = std::exp(ne.log_value);
      pt.value = std::abs(val - 2.0);
      pt.se = val * ne.se_log;
    } else {
      throw DomainError("check_regime_convergence: unsupported pair " +
                        spec.model + "/" + spec.regime);
    }

    r.push("n_" + std::to_string(i), n);
    r.push("d_" + std::to_string(i), pt.value);
    r.push("se_" + std::to_string(i), pt.se);
    dd.push_back(pt);
  }

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < dd.size(); ++i) {
    const double comb = std::sqrt(dd[i].se * dd[i].se +
                                  dd[i + 1].se * dd[i + 1].se);
    const double zi = comb > 0.0
                          ? (dd[i + 1].value - dd[i].value) / comb
                          : (dd[i + 1].value > dd[i].value ? 1e30 : 0.0);
    worst = std::max(worst, zi);
  }
  r.lhs = dd.front().value;
  r.rhs = dd.back().value;
  r.stderr_lhs = dd.front().se;
  r.stderr_rhs = dd.back().se;
  r.z_score = worst;
  r.pass = worst <= 2.0 && dd.back().value < dd.front().value;
  r.status = r.pass ? "pass" : "fail";
  return r;
}

void write_json_lines(std::ostream& os,
                      const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) os << r.to_json_line() << '\n';
}

void write_summary(std::ostream& os, const std::vector<CheckReport>& reports) {
  os << "check              lhs            rhs            z        status\n";
  int passed = 0, failed = 0;
  for (const auto& r : reports) {
    std::ostringstream line;
    line.setf(std::ios::left);
    line.width(19);
    line << r.check_name;
    line.setf(std::ios::right);
    line.precision(6);
    line.width(14);
    line << r.lhs;
    line.width(15);
    line << r.rhs;
    line.precision(2);
    line.setf(std::ios::fixed);
    line.width(9);
    line << r.z_score;
    os << line.str() << "  " << r.status << '\n';
    if (r.status == "pass") ++passed;
    if (r.status == "fail") ++failed;
  }
  os << passed << " passed, " << failed << " failed, "
     << (static_cast<int>(reports.size()) - passed - failed)
     << " inconclusive\n";
}

}  // namespace verify
}  // namespace saddlestat
