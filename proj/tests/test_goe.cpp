#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "saddlestat/errors.hpp"
#include "saddlestat/goe.hpp"
#include "saddlestat/special.hpp"
#include "saddlestat/stats.hpp"

using namespace saddlestat;

TEST_CASE("2x2 spacing matches the closed form") {
  // gap = sqrt((a-b)^2 + 4c^2) = 2 sqrt(v) chi_2; mean = 2 sqrt(v pi / 2)
  for (double v : {0.5, 0.25}) {
    goe::GoeSampler s{2, v, goe::Method::Dense, 11};
    MomentAccumulator gap;
    const int nsamp = 100000;
    for (int i = 0; i < nsamp; ++i) {
      const Eigen::VectorXd lam = goe::sample_spectrum(s, i);
      gap.add(lam[0] - lam[1]);
    }
    const double expect = oracle::mean_spacing_2x2(v);
    CHECK(std::fabs(gap.mean - expect) < 4.0 * gap.stderr_mean());
  }
}

TEST_CASE("n = 1 spectrum is the diagonal gaussian") {
  goe::GoeSampler dense{1, 0.5, goe::Method::Dense, 3};
  goe::GoeSampler tri{1, 0.5, goe::Method::Tridiagonal, 3};
  MomentAccumulator m;
  for (int i = 0; i < 50000; ++i) {
    const double a = goe::sample_spectrum(dense, i)[0];
    const double b = goe::sample_spectrum(tri, i)[0];
    CHECK(a == b);  // both reduce to the same single normal draw
    m.add(a);
  }
  CHECK(std::fabs(m.mean) < 4.0 * m.stderr_mean());
  CHECK(std::fabs(m.variance() - 1.0) < 0.03);  // 2v = 1
}

TEST_CASE("dense and tridiagonal draws share one eigenvalue law") {
  const int n = 32, nsamp = 2000;
  goe::GoeSampler dense{n, 0.5, goe::Method::Dense, 21};
  goe::GoeSampler tri{n, 0.5, goe::Method::Tridiagonal, 22};
  std::vector<double> top_d, top_t, mid_d, mid_t, all_d, all_t;
  for (int i = 0; i < nsamp; ++i) {
    const Eigen::VectorXd a = goe::sample_spectrum(dense, i);
    const Eigen::VectorXd b = goe::sample_spectrum(tri, i);
    top_d.push_back(a[0]);
    top_t.push_back(b[0]);
    mid_d.push_back(a[n / 2]);
    mid_t.push_back(b[n / 2]);
    for (int k = 0; k < n; ++k) {
      all_d.push_back(a[k]);
      all_t.push_back(b[k]);
    }
  }
  CHECK(ks_statistic(top_d, top_t) < ks_critical(top_d.size(), top_t.size(), 0.01));
  CHECK(ks_statistic(mid_d, mid_t) < ks_critical(mid_d.size(), mid_t.size(), 0.01));
  // pooled spectra are dependent within a draw; hold them to the critical
  // value of the independent per-draw count, which is far looser
  CHECK(ks_statistic(all_d, all_t) <
        ks_critical(static_cast<std::size_t>(nsamp), static_cast<std::size_t>(nsamp), 0.01));
}

TEST_CASE("large-n spectrum approaches the semicircle") {
  const int n = 2000;
  goe::GoeSampler s{n, 0.5, goe::Method::Tridiagonal, 5};
  const double edge = goe::spectral_edge(s);
  CHECK(std::fabs(edge - std::sqrt(2.0 * n)) < 1e-12);
  std::vector<double> scaled;
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd lam = goe::sample_spectrum(s, i);
    CHECK(lam.size() == n);
    for (int k = 0; k + 1 < n; ++k) CHECK(lam[k] >= lam[k + 1]);  // descending
    for (int k = 0; k < n; ++k) scaled.push_back(lam[k] / edge);
  }
  std::sort(scaled.begin(), scaled.end());
  // empirical cdf against 1 - t(lambda) on a grid
  double worst = 0.0;
  for (int g = -9; g <= 9; ++g) {
    const double x = 0.1 * g;
    const auto it = std::lower_bound(scaled.begin(), scaled.end(), x);
    const double fhat =
        static_cast<double>(it - scaled.begin()) / static_cast<double>(scaled.size());
    worst = std::max(worst, std::fabs(fhat - (1.0 - special::semicircle_cdf(x))));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("order statistics agree across methods and paths") {
  const int n = 24;
  goe::GoeSampler dense{n, 0.5, goe::Method::Dense, 9};
  goe::GoeSampler tri{n, 0.5, goe::Method::Tridiagonal, 9};
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd full_d = goe::sample_spectrum(dense, i);
    const Eigen::VectorXd full_t = goe::sample_spectrum(tri, i);
    for (int k : {0, 1, 5, n / 2, n - 1}) {
      CHECK(goe::order_statistic(dense, i, k) == full_d[k]);  // same solve
      // Sturm bisection against the QL spectrum of the same draw
      CHECK(std::fabs(goe::order_statistic(tri, i, k) - full_t[k]) < 5e-9);
    }
    const auto top_t = goe::top_order_statistics(tri, i, 5);
    const auto top_d = goe::top_order_statistics(dense, i, 5);
    for (int k = 0; k <= 5; ++k) {
      CHECK(top_d[static_cast<std::size_t>(k)] == full_d[k]);
      CHECK(std::fabs(top_t[static_cast<std::size_t>(k)] - full_t[k]) < 5e-9);
      if (k > 0)
        CHECK(top_t[static_cast<std::size_t>(k)] <= top_t[static_cast<std::size_t>(k - 1)]);
    }
  }
}

TEST_CASE("edge rescale round trip and transform") {
  for (int n : {10, 200, 2000}) {
    for (double lam : {-3.0, 0.0, 10.0, 60.0}) {
      const double sig = goe::edge_rescale(lam, n);
      CHECK(std::fabs(goe::edge_rescale_inverse(sig, n) - lam) < 1e-11);
      const Transform t = goe::edge_transform(n);
      CHECK(std::fabs(t.scale * lam + t.shift - sig) < 1e-10);
    }
    // the soft edge maps to zero
    CHECK(std::fabs(goe::edge_rescale(std::sqrt(2.0 * n), n)) < 1e-10);
  }
}

TEST_CASE("gaussian order-statistic approximations") {
  const int n = 1000;
  // edge branch restated from its definition
  for (int k : {1, 2, 3, 10}) {
    const auto g = goe::gaussian_approx(n, k, goe::Branch::Edge);
    const double a = std::pow(3.0 * M_PI * k / (4.0 * std::sqrt(2.0) * n), 2.0 / 3.0);
    CHECK(std::fabs(g.mu - std::sqrt(2.0 * n) * (1.0 - a)) < 1e-12);
    const double var = 2.0 * std::log(static_cast<double>(k)) /
                       (std::cbrt(static_cast<double>(n)) *
                        std::pow(12.0 * M_PI * k, 2.0 / 3.0));
    CHECK(std::fabs(g.sigma - std::sqrt(var)) < 1e-12);
  }
  // location decreases with depth
  double prev = goe::gaussian_approx(n, 1, goe::Branch::Edge).mu;
  for (int k = 2; k <= 6; ++k) {
    const double mu = goe::gaussian_approx(n, k, goe::Branch::Edge).mu;
    CHECK(mu < prev);
    prev = mu;
  }
  // bulk branch: the location quantile inverts to k/n, midpoint sits at zero
  const auto mid = goe::gaussian_approx(n, n / 2, goe::Branch::Bulk);
  CHECK(std::fabs(mid.mu) < 1e-9);
  CHECK(std::fabs(mid.sigma - std::sqrt(std::log(1000.0) / 2000.0)) < 1e-12);
  const auto quarter = goe::gaussian_approx(n, n / 4, goe::Branch::Bulk);
  CHECK(std::fabs(special::semicircle_cdf(quarter.mu / std::sqrt(2.0 * n)) - 0.25) <
        1e-10);
  CHECK(quarter.mu > 0.0);

  CHECK_THROWS_AS(goe::gaussian_approx(n, 0, goe::Branch::Edge), DomainError);
  CHECK_THROWS_AS(goe::gaussian_approx(n, 0, goe::Branch::Bulk), DomainError);
  CHECK_THROWS_AS(goe::gaussian_approx(n, n, goe::Branch::Edge), DomainError);
  CHECK_THROWS_AS(goe::gaussian_approx(1, 1, goe::Branch::Edge), DomainError);
}

TEST_CASE("edge approximation tracks the monte carlo mean") {
  // the location error of the approximation at k = 1 is O(0.05) here, well
  // inside the loose window; this guards the constants, not the tails
  const int n = 1000, nsamp = 800;
  goe::GoeSampler s{n, 0.5, goe::Method::Tridiagonal, 31};
  MomentAccumulator m;
  for (int i = 0; i < nsamp; ++i) m.add(goe::order_statistic(s, i, 1));
  const auto g = goe::gaussian_approx(n, 1, goe::Branch::Edge);
  CHECK(std::fabs(m.mean - g.mu) < 0.15);
}

TEST_CASE("top eigenvalue rescales to a tracy-widom-like shape") {
  const int n = 200, nsamp = 3000;
  goe::GoeSampler s{n, 0.5, goe::Method::Tridiagonal, 17};
  MomentAccumulator m;
  for (int i = 0; i < nsamp; ++i)
    m.add(goe::edge_rescale(goe::order_statistic(s, i, 0), n));
  // limiting mean -1.2065, sd 1.2680; allow finite-n drift
  CHECK(m.mean > -1.6);
  CHECK(m.mean < -0.9);
  CHECK(m.sd() > 1.0);
  CHECK(m.sd() < 1.5);
}

TEST_CASE("density histograms and families share their draws") {
  const int n = 8;
  const BinSpec spec{-6.0, 6.0, 48};
  goe::GoeSampler s{n, 0.5, goe::Method::Dense, 41};
  const std::int64_t nsamp = 2 * 4096 + 777;

  const auto h1 = goe::order_statistic_density(s, 0, spec, nsamp, 1);
  const auto h3 = goe::order_statistic_density(s, 0, spec, nsamp, 3);
  CHECK(h1.n_samples == nsamp);
  for (int b = 0; b < spec.nbins; ++b) CHECK(h1.count(b) == h3.count(b));
  CHECK(h1.underflow() == h3.underflow());
  CHECK(h1.overflow() == h3.overflow());
  CHECK(h1.coverage_fraction() > 0.999);
  CHECK(h1.matrix_n == n);
  CHECK(h1.k == 0);

  const auto fam = goe::spectrum_family(s, spec, nsamp, 3);
  CHECK(fam.per_k.size() == static_cast<std::size_t>(n));
  CHECK(fam.total.multiplicity == n);
  for (int b = 0; b < spec.nbins; ++b) {
    std::int64_t acc = 0;
    for (const auto& h : fam.per_k) acc += h.count(b);
    CHECK(acc == fam.total.count(b));  // exact shared-draw identity
    }
  // same seed and method: the k = 0 member reproduces the standalone histogram
  for (int b = 0; b < spec.nbins; ++b) CHECK(fam.per_k[0].count(b) == h1.count(b));

  const BinSpec sigma_spec{-8.0, 4.0, 40};
  const auto ef = goe::edge_family(s, 2, sigma_spec, nsamp, 3);
  const auto h_edge = goe::order_statistic_density(s, 0, sigma_spec, nsamp, 1, true);
  CHECK(ef.per_k.size() == 3);
  for (int b = 0; b < sigma_spec.nbins; ++b)
    CHECK(ef.per_k[0].count(b) == h_edge.count(b));
  CHECK(ef.per_k[0].transform.kind == "edge");
  CHECK(h_edge.transform.kind == "edge");
}

TEST_CASE("sampler domain errors") {
  goe::GoeSampler bad{0, 0.5, goe::Method::Dense, 1};
  CHECK_THROWS_AS(goe::sample_spectrum(bad, 0), DomainError);
  goe::GoeSampler nv{4, -1.0, goe::Method::Dense, 1};
  CHECK_THROWS_AS(goe::sample_spectrum(nv, 0), DomainError);
  goe::GoeSampler ok{4, 0.5, goe::Method::Dense, 1};
  CHECK_THROWS_AS(goe::order_statistic(ok, 0, 4), DomainError);
  CHECK_THROWS_AS(goe::order_statistic(ok, 0, -1), DomainError);
  CHECK_THROWS_AS(goe::top_order_statistics(ok, 0, 7), DomainError);
  CHECK_THROWS_AS(goe::order_statistic_density(ok, 0, BinSpec{0, 1, 4}, 0), DomainError);
  CHECK_THROWS_AS(goe::edge_rescale(1.0, 0), DomainError);
}
