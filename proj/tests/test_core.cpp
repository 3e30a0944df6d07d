#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "saddlestat/errors.hpp"
#include "saddlestat/histogram.hpp"
#include "saddlestat/quadrature.hpp"
#include "saddlestat/rng.hpp"
#include "saddlestat/stats.hpp"
#include "saddlestat/threading.hpp"

using namespace saddlestat;

TEST_CASE("gauss-legendre rule basics") {
  for (int n : {2, 4, 8, 16, 32}) {
    const auto& r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    CHECK(std::fabs(wsum - 2.0) < 1e-14);
    // node symmetry
    for (int i = 0; i < n / 2; ++i)
      CHECK(std::fabs(r.nodes[static_cast<std::size_t>(i)] +
                      r.nodes[static_cast<std::size_t>(n - 1 - i)]) < 1e-14);
    // exact through degree 2n-1: Int_{-1}^{1} x^d dx
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double acc = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * std::pow(r.nodes[i], d);
      const double exact = (d % 2 == 1) ? 0.0 : 2.0 / (d + 1.0);
      CHECK(std::fabs(acc - exact) < 1e-13);
    }
  }
}

TEST_CASE("panel and adaptive quadrature against closed forms") {
  const double q1 = integrate_panels([](double x) { return x * x * x; }, 0.0, 2.0, 3);
  CHECK(std::fabs(q1 - 4.0) < 1e-13);

  const double q2 = integrate_adaptive(
      [](double x) { return std::exp(-x * x); }, -10.0, 10.0, 1e-12);
  CHECK(std::fabs(q2 - std::sqrt(M_PI)) < 1e-12);

  const double q3 = integrate_adaptive([](double x) { return std::cos(3.0 * x); },
                                       0.0, 1.0, 1e-12);
  CHECK(std::fabs(q3 - std::sin(3.0) / 3.0) < 1e-12);
}

TEST_CASE("log-space quadrature handles exponents past double overflow") {
  // Int exp(c - a (x-mu)^2) dx = exp(c) sqrt(pi/a); c = 1000 overflows exp()
  const double c = 1000.0, a = 1.0e4, mu = 1.0;
  const double lg = log_integrate_adaptive(
      [&](double x) { return c - a * (x - mu) * (x - mu); }, 0.0, 2.0, 1e-12);
  const double exact = c + 0.5 * std::log(M_PI / a);
  CHECK(std::fabs(lg - exact) < 1e-10);

  // plain Gaussian against the analytic log integral
  const double lgn = log_integrate_adaptive(
      [](double x) { return -0.5 * x * x; }, -12.0, 12.0, 1e-12);
  CHECK(std::fabs(lgn - 0.5 * std::log(2.0 * M_PI)) < 1e-11);
}

TEST_CASE("log_integrate_expand finds a far-off peak") {
  // mass sits at x = 37, initial window [0, 1]
  const double lg = log_integrate_expand(
      [](double x) { return -0.5 * (x - 37.0) * (x - 37.0); }, 0.0, 1.0);
  CHECK(std::fabs(lg - 0.5 * std::log(2.0 * M_PI)) < 1e-9);
}

TEST_CASE("logsumexp and logaddexp") {
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(logsumexp({}) == ninf);
  CHECK(logsumexp({ninf, ninf}) == ninf);
  CHECK(std::fabs(logsumexp({0.0, 0.0}) - std::log(2.0)) < 1e-15);
  CHECK(std::fabs(logsumexp({1000.0, 1000.0}) - (1000.0 + std::log(2.0))) < 1e-12);
  CHECK(std::fabs(logaddexp(-1500.0, -1500.0) - (-1500.0 + std::log(2.0))) < 1e-12);
  CHECK(logaddexp(ninf, 3.0) == 3.0);
  CHECK(logaddexp(3.0, ninf) == 3.0);
}

TEST_CASE("rng substreams are deterministic and decorrelated") {
  Xoshiro256 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  int agree_c = 0, agree_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a();
    CHECK(va == b());
    agree_c += (va == c());
    agree_d += (va == d());
  }
  CHECK(agree_c == 0);
  CHECK(agree_d == 0);

  // same (seed, stream) through SampleRng reproduces the same doubles
  SampleRng r1(9, 101), r2(9, 101);
  for (int i = 0; i < 100; ++i) CHECK(r1.normal() == r2.normal());
}

TEST_CASE("rng scalar draws match their moments") {
  const int n = 200000;
  MomentAccumulator mn, mu, mchi;
  for (int i = 0; i < n; ++i) {
    SampleRng r(123, static_cast<std::uint64_t>(i));
    mn.add(r.normal(2.0, 3.0));
    mu.add(r.uniform());
    mchi.add(r.chi(3.0));
  }
  CHECK(std::fabs(mn.mean - 2.0) < 4.0 * 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(mn.sd() - 3.0) < 0.05);
  CHECK(std::fabs(mu.mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(std::fabs(mu.variance() - 1.0 / 12.0) < 1e-3);
  // E[chi_k] = sqrt(2) Gamma((k+1)/2) / Gamma(k/2); k = 3 gives 2 sqrt(2/pi)
  const double chi3_mean = 2.0 * std::sqrt(2.0 / M_PI);
  CHECK(std::fabs(mchi.mean - chi3_mean) <
        4.0 * mchi.sd() / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("parallel_blocks is bit-identical across thread counts") {
  const std::int64_t n = 3 * kSampleBlock + 1234;  // not a block multiple
  auto fn = [](std::int64_t first, std::int64_t last) {
    double s = 0.0;
    for (std::int64_t i = first; i < last; ++i) {
      SampleRng r(7, static_cast<std::uint64_t>(i));
      s += std::sin(r.normal());
    }
    return s;
  };
  auto fold = [](double& acc, const double& v) { acc += v; };
  const double t1 = parallel_blocks<double>(n, 1, fn, fold, 0.0);
  const double t3 = parallel_blocks<double>(n, 3, fn, fold, 0.0);
  const double t8 = parallel_blocks<double>(n, 8, fn, fold, 0.0);
  CHECK(t1 == t3);
  CHECK(t1 == t8);
}

TEST_CASE("moment accumulator merge equals one pass") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd(1.0e6, 2.0);  // shifted data stresses m2
  std::vector<double> xs(5000);
  for (auto& x : xs) x = nd(g);

  MomentAccumulator whole, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.add(xs[i]);
    (i < 2000 ? left : right).add(xs[i]);
  }
  left.merge(right);
  CHECK(left.n == whole.n);
  CHECK(std::fabs(left.mean - whole.mean) < 1e-9 * std::fabs(whole.mean));
  CHECK(std::fabs(left.variance() - whole.variance()) / whole.variance() < 1e-9);
  CHECK(std::fabs(whole.sd() - 2.0) < 0.1);
  CHECK(std::fabs(whole.stderr_mean() - whole.sd() / std::sqrt(5000.0)) < 1e-12);

  MomentAccumulator empty;
  empty.merge(whole);
  CHECK(empty.n == whole.n);
  CHECK(empty.mean == whole.mean);
}

TEST_CASE("ks statistic basics") {
  // identical samples, including ties
  std::vector<double> a = {1.0, 2.0, 2.0, 3.0};
  CHECK(ks_statistic(a, a) == 0.0);

  // disjoint supports: D = 1
  std::vector<double> lo = {0.0, 0.1, 0.2}, hi = {5.0, 5.1};
  CHECK(ks_statistic(lo, hi) == 1.0);

  // hand-computed: a = {1, 3}, b = {2, 4} -> D = 1/2
  CHECK(std::fabs(ks_statistic({1.0, 3.0}, {2.0, 4.0}) - 0.5) < 1e-15);

  // same distribution, large samples: D below the 1% critical value
  std::mt19937_64 g(11);
  std::normal_distribution<double> nd;
  std::vector<double> x(4000), y(4000);
  for (auto& v : x) v = nd(g);
  for (auto& v : y) v = nd(g);
  CHECK(ks_statistic(x, y) < ks_critical(x.size(), y.size(), 0.01));
  // shifted distribution: D above it
  for (auto& v : y) v += 0.2;
  CHECK(ks_statistic(x, y) > ks_critical(x.size(), y.size(), 0.01));

  CHECK_THROWS_AS(ks_statistic({}, {1.0}), DomainError);
}

TEST_CASE("normal quantile and cdf round trip") {
  CHECK(std::fabs(normal_quantile(0.5)) < 1e-15);
  for (double p : {1e-10, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
    const double q = normal_quantile(p);
    CHECK(std::fabs(normal_cdf(q) - p) <= 1e-12 * std::max(1.0, std::fabs(p)));
    CHECK(std::fabs(normal_quantile(1.0 - p) + q) < 1e-8 * std::max(1.0, std::fabs(q)));
  }
  CHECK(std::fabs(normal_quantile(0.975) - 1.959963984540054) < 1e-9);
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("z threshold widens past ten comparisons") {
  CHECK(z_threshold(1) == 3.0);
  CHECK(z_threshold(10) == 3.0);
  const double z20 = z_threshold(20);
  CHECK(z20 > 3.0);
  // alpha scaled by 10/20: z = Phi^{-1}(1 - alpha3/4), alpha3 = 2 Phi(-3)
  const double alpha3 = 2.0 * normal_cdf(-3.0);
  CHECK(std::fabs(z20 - (-normal_quantile(alpha3 / 4.0))) < 1e-10);
  CHECK(z_threshold(100) > z20);
}

TEST_CASE("empirical density counts, normalization, serialization") {
  const BinSpec spec{0.0, 1.0, 20};
  EmpiricalDensity h(spec);
  h.n_samples = 100000;
  h.seed = 77;
  std::mt19937_64 g(77);
  std::uniform_real_distribution<double> u(-0.1, 1.1);  // 1/6 lands outside
  std::int64_t inside = 0;
  for (std::int64_t i = 0; i < h.n_samples; ++i) {
    const double x = u(g);
    h.add(x);
    inside += (x >= 0.0 && x < 1.0);
  }
  CHECK(h.entries() == h.n_samples);
  CHECK(h.underflow() + h.overflow() == h.n_samples - inside);
  CHECK(std::fabs(h.coverage_fraction() - 5.0 / 6.0) < 0.01);

  double mass = 0.0;
  for (int i = 0; i < h.nbins(); ++i) mass += h.density(i) * h.bin_width();
  CHECK(std::fabs(mass - static_cast<double>(inside) / h.n_samples) < 1e-12);

  // binomial stderr for one entry per sample
  const double p0 = static_cast<double>(h.count(0)) / h.n_samples;
  const double se0 = std::sqrt(p0 * (1.0 - p0) / h.n_samples) / h.bin_width();
  CHECK(std::fabs(h.stderr_density(0) - se0) < 1e-15);

  // merge doubles every count; incompatible binning throws
  EmpiricalDensity h2 = h;
  h2.merge(h);
  CHECK(h2.count(3) == 2 * h.count(3));
  CHECK(h2.n_samples == 2 * h.n_samples);
  EmpiricalDensity other{BinSpec{0.0, 1.0, 21}};
  CHECK_THROWS_AS(h2.merge(other), DomainError);

  std::ostringstream csv;
  h.write_csv(csv, {{"model", "test"}});
  const std::string text = csv.str();
  CHECK(text.find("# model: test") != std::string::npos);
  CHECK(text.find("bin_left,bin_right,density,stderr") != std::string::npos);
  CHECK(text.find("# seed: 77") != std::string::npos);

  const auto j = nlohmann::json::parse(h.to_json_string());
  CHECK(j["schema_version"].get<int>() == 1);
  CHECK(j["bins"].size() == 20);
  CHECK(j["bins"][0]["count"].get<std::int64_t>() == h.count(0));
  CHECK(j["n_samples"].get<std::int64_t>() == h.n_samples);
}

TEST_CASE("bin auto rule follows the cube root of the sample count") {
  CHECK(BinSpec::auto_rule(0.0, 1.0, 1000).nbins == 10);
  CHECK(BinSpec::auto_rule(0.0, 1.0, 1001).nbins == 11);
  CHECK(BinSpec::auto_rule(-2.0, 2.0, 1).nbins == 1);
  CHECK_THROWS_AS(BinSpec::auto_rule(1.0, 1.0, 100), DomainError);
  CHECK_THROWS_AS(BinSpec::auto_rule(0.0, 1.0, 0), DomainError);
}

TEST_CASE("transform defaults") {
  Transform t;
  CHECK(t.scale == 1.0);
  CHECK(t.shift == 0.0);
  CHECK(t.kind == "identity");
}
