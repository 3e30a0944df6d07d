#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "saddlestat/errors.hpp"
#include "saddlestat/quadrature.hpp"
#include "saddlestat/special.hpp"

using namespace saddlestat;

TEST_CASE("airy values at zero") {
  CHECK(std::fabs(special::airy_ai(0.0) - 0.3550280538878172) < 1e-12);
  CHECK(std::fabs(special::airy_ai_prime(0.0) - (-0.2588194037928068)) < 1e-12);
  const auto init = oracle::airy_initial();
  CHECK(std::fabs(special::airy_ai(0.0) - static_cast<double>(init.y)) < 1e-14);
  CHECK(std::fabs(special::airy_ai_prime(0.0) - static_cast<double>(init.yp)) < 1e-14);
}

TEST_CASE("airy matches the RK ODE oracle on [-40, 5]") {
  // 512-point grid, split by sign for the two sweep directions
  std::vector<long double> neg, pos;
  std::vector<double> xs;
  const int npts = 512;
  for (int i = 0; i < npts; ++i) {
    const double x = -40.0 + 45.0 * (static_cast<double>(i) + 0.5) / npts;
    xs.push_back(x);
    if (x < 0.0) neg.push_back(static_cast<long double>(x));
    else pos.push_back(static_cast<long double>(x));
  }
  std::sort(neg.begin(), neg.end(), std::greater<long double>());  // toward -40
  std::sort(pos.begin(), pos.end());
  const auto sneg = oracle::airy_sweep(neg);
  const auto spos = oracle::airy_sweep(pos);

  double worst_ai = 0.0, worst_aip = 0.0;
  auto compare = [&](const std::vector<long double>& grid,
                     const std::vector<oracle::AiryState>& ref) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = static_cast<double>(grid[i]);
      worst_ai = std::max(worst_ai,
                          std::fabs(special::airy_ai(x) - static_cast<double>(ref[i].y)));
      worst_aip = std::max(
          worst_aip,
          std::fabs(special::airy_ai_prime(x) - static_cast<double>(ref[i].yp)));
    }
  };
  compare(neg, sneg);
  compare(pos, spos);
  CHECK(worst_ai <= 1e-10);
  CHECK(worst_aip <= 1e-10);
}

TEST_CASE("airy branches agree at the crossovers") {
  for (double x : {6.0, -8.0}) {
    const double below = special::airy_ai(std::nextafter(x, -100.0));
    const double above = special::airy_ai(std::nextafter(x, 100.0));
    CHECK(std::fabs(below - above) < 1e-11);
    const double pb = special::airy_ai_prime(std::nextafter(x, -100.0));
    const double pa = special::airy_ai_prime(std::nextafter(x, 100.0));
    CHECK(std::fabs(pb - pa) < 1e-11);
  }
}

TEST_CASE("airy decay and known sample values") {
  // classic tabulated points
  CHECK(std::fabs(special::airy_ai(1.0) - 0.1352924163128814) < 1e-12);
  CHECK(std::fabs(special::airy_ai(-1.0) - 0.5355608832923521) < 1e-12);
  CHECK(std::fabs(special::airy_ai_prime(1.0) - (-0.1591474412967932)) < 1e-12);
  CHECK(special::airy_ai(10.0) < 2e-10);
  CHECK(special::airy_ai(10.0) > 0.0);
}

TEST_CASE("ODE-consistency via corrected second differences") {
  // Second central difference minus the h^2/12 Taylor term (expressed through
  // the ODE's own rhs) leaves residual O(h^4) + roundoff; long double keeps
  // the roundoff floor below the tolerance across the whole window.
  const long double h = 5e-3L;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const long double x = -20.0L + 25.0L * (i + 0.5L) / 100.0L;
    const long double yp = special::airy_ai<long double>(x + h);
    const long double ym = special::airy_ai<long double>(x - h);
    const long double y0 = special::airy_ai<long double>(x);
    const long double d0 = special::airy_ai_prime<long double>(x);
    const long double second = (yp + ym - 2.0L * y0) / (h * h);
    const long double taylor4 = 2.0L * d0 + x * x * y0;  // (x Ai)'' via the ODE
    const long double resid = second - x * y0 - (h * h / 12.0L) * taylor4;
    worst = std::max(worst, std::fabs(static_cast<double>(y0 * resid)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("airy tail integral") {
  CHECK(std::fabs(special::airy_ai_tail_integral(0.0) - 1.0 / 3.0) <= 1e-10);
  CHECK(std::fabs(special::airy_ai_tail_integral_direct(0.0) - 1.0 / 3.0) <= 1e-10);

  // cached Hermite table vs direct adaptive quadrature
  for (double x : {-40.0, -25.5, -10.0, -3.3, -0.7, 1.2, 4.8, 9.0, 13.9}) {
    const double a = special::airy_ai_tail_integral(x);
    const double b = special::airy_ai_tail_integral_direct(x);
    CHECK(std::fabs(a - b) < 2e-10);
  }

  // independent Simpson oracle on a finite stretch
  const double body =
      oracle::adaptive_simpson([](double t) { return special::airy_ai(t); },
                               -5.0, 0.0, 1e-13);
  const double diff = special::airy_ai_tail_integral(-5.0) -
                      special::airy_ai_tail_integral(0.0);
  CHECK(std::fabs(body - diff) < 1e-10);

  // tail must vanish at the far right and approach total mass 1/3 + left lobe
  CHECK(special::airy_ai_tail_integral(14.0) < 1e-15);
  CHECK(special::airy_ai_tail_integral(20.0) < 1e-20);
}

TEST_CASE("rho_edge shape") {
  // nonnegative on a wide grid
  for (int i = 0; i <= 400; ++i) {
    const double lam = -30.0 + 38.0 * i / 400.0;
    CHECK(special::rho_edge(lam) >= -1e-14);
  }
  // matches the bulk square-root profile deep on the negative side
  const double bulk = std::sqrt(25.0) / M_PI;
  CHECK(std::fabs(special::rho_edge(-25.0) - bulk) / bulk < 0.02);
  // decays into the gap
  CHECK(special::rho_edge(8.0) < 1e-6);
  CHECK(special::rho_edge(4.0) < special::rho_edge(0.0));
}

TEST_CASE("rho_edge integrates like the edge count") {
  // Int_{-L}^{inf} rho_edge = (2/3pi) L^{3/2} + o(L^{3/2}): compare against
  // direct quadrature for L = 20 with the known 1/2-order correction absent
  const double L = 20.0;
  const double got = integrate_adaptive(
      [](double x) { return special::rho_edge(x); }, -L, 10.0, 1e-9, 1e-11, 16, 20, 64);
  const double lead = 2.0 / (3.0 * M_PI) * std::pow(L, 1.5);
  CHECK(std::fabs(got - lead) / lead < 0.05);
}

TEST_CASE("semicircle density") {
  CHECK(special::rho_sc(0.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-14));
  CHECK(special::rho_sc(1.0) == 0.0);
  CHECK(special::rho_sc(-2.0) == 0.0);
  CHECK(special::rho_sc(0.4) == special::rho_sc(-0.4));
  const double norm = integrate_adaptive(
      [](double x) { return special::rho_sc(x); }, -1.0, 1.0, 1e-10, 0.0, 16, 20, 32);
  CHECK(std::fabs(norm - 1.0) < 1e-8);
}

TEST_CASE("semicircle cdf and quantile") {
  CHECK(special::semicircle_cdf(-1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(special::semicircle_cdf(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(std::fabs(special::semicircle_cdf(0.0) - 0.5) < 1e-14);
  CHECK(std::fabs(special::semicircle_cdf(0.5) - 0.1955011094778853) < 1e-12);

  // strictly decreasing
  double prev = special::semicircle_cdf(-1.0);
  for (int i = 1; i <= 200; ++i) {
    const double lam = -1.0 + 2.0 * i / 200.0;
    const double cur = special::semicircle_cdf(lam);
    CHECK(cur < prev);
    prev = cur;
  }

  CHECK(special::semicircle_quantile(0.0) == 1.0);
  CHECK(special::semicircle_quantile(1.0) == -1.0);
  CHECK(std::fabs(special::semicircle_quantile(0.5)) < 1e-12);
  for (int i = 0; i <= 1000; ++i) {
    const double x = static_cast<double>(i) / 1000.0;
    const double q = special::semicircle_quantile(x);
    if (x > 0.0 && x < 1.0)
      CHECK(std::fabs(special::semicircle_cdf(q) - x) <= 1e-12);
  }
}

TEST_CASE("log_gamma") {
  CHECK(std::fabs(special::log_gamma(1.0)) < 1e-14);
  CHECK(std::fabs(special::log_gamma(0.5) - 0.5 * std::log(M_PI)) < 1e-13);
  CHECK(std::fabs(special::log_gamma(10.0) - std::log(362880.0)) < 1e-10);
  CHECK_THROWS_AS(special::log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(special::log_gamma(-1.0), DomainError);
}

TEST_CASE("domain errors on non-finite input") {
  const double nan = std::nan("");
  CHECK_THROWS_AS(special::airy_ai(nan), DomainError);
  CHECK_THROWS_AS(special::airy_ai_prime(nan), DomainError);
  CHECK_THROWS_AS(special::airy_ai_tail_integral(nan), DomainError);
  CHECK_THROWS_AS(special::rho_edge(nan), DomainError);
  CHECK_THROWS_AS(special::rho_sc(nan), DomainError);
  CHECK_THROWS_AS(special::semicircle_cdf(2.0), DomainError);
  CHECK_THROWS_AS(special::semicircle_quantile(1.5), DomainError);
}
