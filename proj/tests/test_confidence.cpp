#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/zeta.hpp>

#include "lilklucb/confidence.hpp"

using namespace lilklucb;

namespace {

ArmStats stats_of(double mean, std::uint64_t pulls) {
  return ArmStats{pulls, mean * static_cast<double>(pulls)};
}

double D(double p, double q) { return detail::kl(p, q); }

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (auto k : {SchemeKind::kl_tilted, SchemeKind::kl_prime, SchemeKind::sg1, SchemeKind::sg2}) {
    CHECK(parse_scheme(scheme_name(k)) == k);
  }
  CHECK_THROWS_AS((void)parse_scheme("klucb"), std::invalid_argument);
}

TEST_CASE("kappa(1, delta) matches the zeta(2) closed form") {
  for (double delta : {0.01, 0.05, 0.5}) {
    const double expected = std::sqrt(delta) * std::sqrt(std::numbers::pi * std::numbers::pi / 6.0);
    CHECK(kappa(1, delta) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(kappa(1, delta) >= expected);
  }
}

TEST_CASE("kappa(8, 0.01) closes the union bound at delta") {
  const int n = 8;
  const double delta = 0.01;
  const double s = 9.0 / 8.0;
  const int l = 3;
  double head = 0.0;
  for (int t = 1; t <= n; ++t) head += std::pow(std::log2(2.0 * t), -s);
  double tail = boost::math::zeta(s);
  for (int k = 1; k <= l; ++k) tail -= std::pow(k, -s);
  const double series = head + n * tail;
  const double k8 = kappa(n, delta);
  const double bound = std::pow(delta, s) * std::pow(k8, -s) * series;
  CHECK(bound <= delta);
  CHECK(bound >= delta * (1.0 - 1e-6));
  CHECK(k8 > 0.0);
}

TEST_CASE("kappa is increasing in delta and needs a power of two") {
  for (int n : {1, 2, 8, 64}) {
    double prev = 0.0;
    for (double delta : {0.001, 0.01, 0.1, 0.5, 0.9}) {
      const double k = kappa(n, delta);
      CHECK(k > prev);
      prev = k;
    }
  }
  CHECK_THROWS_AS((void)kappa(6, 0.01), std::invalid_argument);
  CHECK_THROWS_AS((void)kappa(0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS((void)kappa(8, 1.0), std::invalid_argument);
}

TEST_CASE("c(N) values") {
  const double alpha = 8.0 / 9.0;
  CHECK(c_of_n(8) == doctest::Approx(1.0 / (alpha + (1.0 - alpha) * std::log(1.0 - alpha))).epsilon(1e-14));
  CHECK(c_of_n(8) == doctest::Approx(1.5510).epsilon(1e-4));
  CHECK(c_of_n(1) == doctest::Approx(2.0 / (1.0 - std::log(2.0))).epsilon(1e-14));
  CHECK(c_of_n(1) == doctest::Approx(6.518).epsilon(1e-3));
  double prev = c_of_n(1);
  for (int n : {2, 8, 64, 1024}) {
    const double c = c_of_n(n);
    CHECK(c > 1.0);
    CHECK(c < prev);
    prev = c;
  }
  CHECK(c_of_n(1024) < 1.01);
}

TEST_CASE("BoundScheme validates its parameters") {
  CHECK_THROWS_AS(BoundScheme(SchemeKind::kl_tilted, 3, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(BoundScheme(SchemeKind::kl_prime, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BoundScheme(SchemeKind::sg1, 8, 1.0), std::invalid_argument);
  CHECK_NOTHROW(BoundScheme(SchemeKind::sg2, 3, 0.01));
  const BoundScheme kp(SchemeKind::kl_prime, 8, 0.01);
  CHECK(kp.c() == c_of_n(8));
  CHECK(BoundScheme(SchemeKind::kl_tilted).c() == 1.0);
  CHECK_THROWS_AS((void)BoundScheme(SchemeKind::sg2).threshold(5), std::logic_error);
  CHECK_THROWS_AS((void)kp.radius(5), std::logic_error);
  CHECK_THROWS_AS((void)kp.threshold(0), std::invalid_argument);
}

TEST_CASE("threshold at t = 1 is c log(kappa / delta)") {
  for (auto kind : {SchemeKind::kl_tilted, SchemeKind::kl_prime}) {
    const BoundScheme s(kind, 8, 0.01);
    CHECK(s.threshold(1).value() == doctest::Approx(s.c() * std::log(s.kappa() / 0.01)).epsilon(1e-14));
  }
}

TEST_CASE("threshold strictly decreases for t >= 2 up to 10^6") {
  for (auto kind : {SchemeKind::kl_tilted, SchemeKind::kl_prime}) {
    const BoundScheme s(kind, 8, 0.01);
    double prev = s.threshold(2).value();
    int violations = 0;
    for (std::uint64_t t = 3; t <= 1'000'000; ++t) {
      const double f = s.threshold(t).value();
      if (!(f < prev)) ++violations;
      prev = f;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("doubling delta lowers every threshold") {
  const BoundScheme a(SchemeKind::kl_prime, 8, 0.01);
  const BoundScheme b = a.with_delta(0.02);
  CHECK(b.kappa() == doctest::Approx(kappa(8, 0.02)).epsilon(1e-14));
  for (std::uint64_t t = 1; t <= 100'000; t = t * 3 + 1) {
    CHECK(b.threshold(t).value() < a.threshold(t).value());
  }
}

TEST_CASE("deviation_z hits the boundary for small t and shrinks later") {
  const BoundScheme s(SchemeKind::kl_tilted, 8, 0.01);
  CHECK(deviation_z(s, Prob(0.3), 1, Side::upper) == doctest::Approx(0.7));
  CHECK(deviation_z(s, Prob(0.3), 1, Side::lower) == doctest::Approx(0.3));
  double prev = 1.0;
  for (std::uint64_t t = 100; t <= 1'000'000; t *= 10) {
    const double z = deviation_z(s, Prob(0.3), t, Side::upper);
    CHECK(z < prev);
    const double f = s.threshold(t).value();
    CHECK(D(0.3 + 8.0 / 9.0 * z, 0.3) == doctest::Approx(f).epsilon(1e-9));
    prev = z;
  }
  CHECK_THROWS_AS((void)deviation_z(BoundScheme(SchemeKind::sg1), Prob(0.3), 5, Side::upper),
                  std::invalid_argument);
}

TEST_CASE("t z_t is nondecreasing in t") {
  const BoundScheme s(SchemeKind::kl_tilted, 8, 0.01);
  int violations = 0;
  for (int i = 1; i <= 9; ++i) {
    const Prob mu(i / 10.0);
    for (Side side : {Side::upper, Side::lower}) {
      double prev = 0.0;
      for (std::uint64_t t = 1; t <= 100'000; ++t) {
        const double tz = static_cast<double>(t) * deviation_z(s, mu, t, side);
        if (tz < prev - 1e-12) ++violations;
        prev = tz;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("tilting inequality D(mu + x, mu) <= c(N) D(mu + N x/(N+1), mu)") {
  int violations = 0;
  for (int n : {1, 2, 8, 64}) {
    const double c = c_of_n(n);
    const double w = static_cast<double>(n) / (n + 1.0);
    for (int i = 1; i <= 99; ++i) {
      const double mu = i / 100.0;
      for (int j = 1; j <= 200; ++j) {
        const double x = (1.0 - mu) * j / 200.0;
        const double lhs = D(std::min(1.0, mu + x), mu);
        const double rhs = c * D(mu + w * x, mu);
        if (lhs > rhs + 1e-10) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("bounds nest around the empirical mean and tighten with t") {
  for (auto kind : {SchemeKind::kl_tilted, SchemeKind::kl_prime, SchemeKind::sg1, SchemeKind::sg2}) {
    const BoundScheme s(kind, 8, 0.01);
    for (double p : {0.0, 0.1, 0.5, 0.93, 1.0}) {
      double prev_width = 2.0;
      for (std::uint64_t t = 2; t <= 20'000; t = t * 2 + 1) {
        const auto st = stats_of(p, t);
        const double lo = lower_bound(s, st).value();
        const double hi = upper_bound(s, st).value();
        CHECK(lo <= st.mean());
        CHECK(st.mean() <= hi);
        CHECK(hi - lo <= prev_width);
        prev_width = hi - lo;
      }
    }
  }
}

TEST_CASE("huge thresholds clamp the bounds to the unit interval") {
  for (auto kind : {SchemeKind::kl_tilted, SchemeKind::kl_prime, SchemeKind::sg1, SchemeKind::sg2}) {
    const BoundScheme s(kind, 8, 1e-300);
    CHECK(upper_bound(s, stats_of(0.0, 1)).value() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lower_bound(s, stats_of(1.0, 1)).value() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("bounds reject arms without pulls") {
  const BoundScheme s(SchemeKind::kl_prime);
  CHECK_THROWS_AS((void)upper_bound(s, ArmStats{}), std::invalid_argument);
  CHECK_THROWS_AS((void)lower_bound(s, ArmStats{}), std::invalid_argument);
}

TEST_CASE("kl-prime bound composes the threshold with the plain inverse") {
  const BoundScheme s(SchemeKind::kl_prime, 8, 0.01);
  const double f = c_of_n(8) * std::log(kappa(8, 0.01) * std::log2(2000.0) / 0.01) / 1000.0;
  const auto st = stats_of(0.5, 1000);
  const double hi = upper_bound(s, st).value();
  const double lo = lower_bound(s, st).value();
  CHECK(hi == doctest::Approx(kl_upper_inverse(Prob(0.5), Divergence(f)).value()).epsilon(1e-12));
  CHECK(lo == doctest::Approx(kl_lower_inverse(Prob(0.5), Divergence(f)).value()).epsilon(1e-12));
  CHECK(std::abs(D(0.5, hi) - f) <= 1e-9);
  CHECK(std::abs(D(0.5, lo) - f) <= 1e-9);
}

TEST_CASE("sg1 radius formula") {
  const BoundScheme s(SchemeKind::sg1, 8, 0.01);
  const double log_term = std::log(kappa(8, 0.01) * std::log2(2.0 * 500) / 0.01);
  const double expected = std::sqrt(0.5 * (81.0 / 64.0) * log_term / 500.0);
  CHECK(s.radius(500) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(upper_bound(s, stats_of(0.4, 500)).value() == doctest::Approx(0.4 + expected).epsilon(1e-14));
}

TEST_CASE("sg1 is wider than kl-prime for skewed empirical means") {
  const BoundScheme sg(SchemeKind::sg1, 8, 0.01);
  const BoundScheme kp(SchemeKind::kl_prime, 8, 0.01);
  for (double p : {0.02, 0.98}) {
    for (std::uint64_t t = 20; t <= 2'000'000; t *= 10) {
      const auto st = stats_of(p, t);
      const double w_sg = upper_bound(sg, st).value() - lower_bound(sg, st).value();
      const double w_kp = upper_bound(kp, st).value() - lower_bound(kp, st).value();
      CHECK(w_sg > w_kp);
    }
  }
}

TEST_CASE("kl-prime interval sits inside sg1 away from the middle") {
  const BoundScheme sg(SchemeKind::sg1, 8, 0.01);
  const BoundScheme kp(SchemeKind::kl_prime, 8, 0.01);
  int violations = 0;
  for (int i = 0; i <= 100; ++i) {
    const double p = i / 100.0;
    if (p >= 0.2 && p <= 0.8) continue;
    for (std::uint64_t t = 511; t <= 1'000'000; t = t * 2 + 1) {
      const auto st = stats_of(p, t);
      if (lower_bound(kp, st).value() < lower_bound(sg, st).value() - 1e-12) ++violations;
      if (upper_bound(kp, st).value() > upper_bound(sg, st).value() + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("with few samples the c(N) inflation makes kl-prime the wider interval") {
  const BoundScheme sg(SchemeKind::sg1, 8, 0.01);
  const BoundScheme kp(SchemeKind::kl_prime, 8, 0.01);
  CHECK(upper_bound(kp, stats_of(0.1, 15)).value() > upper_bound(sg, stats_of(0.1, 15)).value());
  CHECK(upper_bound(kp, stats_of(0.19, 255)).value() > upper_bound(sg, stats_of(0.19, 255)).value());
  const auto st = stats_of(0.02, 10);
  CHECK(upper_bound(kp, st).value() - lower_bound(kp, st).value() >
        upper_bound(sg, st).value() - lower_bound(sg, st).value());
}

TEST_CASE("covers agrees with the inverted bounds") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto kind : {SchemeKind::kl_tilted, SchemeKind::kl_prime, SchemeKind::sg1, SchemeKind::sg2}) {
    const BoundScheme s(kind, 8, 0.05);
    for (int trial = 0; trial < 3000; ++trial) {
      const std::uint64_t t = 1 + static_cast<std::uint64_t>(u(gen) * 5000);
      const auto st = stats_of(std::floor(u(gen) * t) / t, t);
      const double mu = u(gen);
      const double hi = upper_bound(s, st).value();
      const double lo = lower_bound(s, st).value();
      if (std::abs(mu - hi) > 1e-12) CHECK(covers(s, st, mu, Side::upper) == (mu <= hi));
      if (std::abs(mu - lo) > 1e-12) CHECK(covers(s, st, mu, Side::lower) == (mu >= lo));
    }
  }
}

TEST_CASE("sg2 exploration constant solves its defining equation") {
  for (double delta : {0.001, 0.01, 0.05, 0.2}) {
    const Sg2Radius r(delta);
    const double x = r.exploration();
    const double e = std::numbers::e;
    CHECK(x >= 8.0 / ((e - 1.0) * (e - 1.0)));
    const double lhs = std::sqrt(e) * boost::math::zeta(2.0 * (1.0 - 1.0 / (2.0 * x))) *
                       std::pow(std::sqrt(x) / (2.0 * std::sqrt(2.0)) + 1.0, 2.0) * std::exp(-x);
    CHECK(lhs <= delta * (1.0 + 1e-9));
    CHECK(lhs == doctest::Approx(delta).epsilon(1e-6));
  }
}

TEST_CASE("sg2 radius decreases in t and in delta") {
  const Sg2Radius r(0.01);
  double prev = r(2);
  for (std::uint64_t t = 3; t <= 100'000; ++t) {
    const double v = r(t);
    CHECK(v < prev);
    prev = v;
  }
  for (std::uint64_t t : {1u, 10u, 1000u}) {
    CHECK(sg2_radius(t, 0.02) < sg2_radius(t, 0.01));
    CHECK(sg2_radius(t, 0.1) < sg2_radius(t, 0.02));
  }
  CHECK(BoundScheme(SchemeKind::sg2, 8, 0.01).radius(77) == doctest::Approx(r(77)).epsilon(1e-14));
}

TEST_CASE("sg2 one-sided coverage on Bernoulli(0.5) streams") {
  const double delta = 0.05;
  const Sg2Radius r(delta);
  std::vector<double> radius(10'001);
  for (std::uint64_t t = 1; t <= 10'000; ++t) radius[t] = r(t);
  std::mt19937_64 gen(2024);
  int violations = 0;
  const int trajectories = 10'000;
  for (int k = 0; k < trajectories; ++k) {
    std::uint64_t ones = 0;
    for (std::uint64_t t = 1; t <= 10'000; ++t) {
      ones += gen() >> 63;
      if (static_cast<double>(ones) / t - 0.5 > radius[t]) {
        ++violations;
        break;
      }
    }
  }
  const double rate = static_cast<double>(violations) / trajectories;
  CHECK(rate <= delta);
}
