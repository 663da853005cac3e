#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "lilklucb/kl_math.hpp"

using namespace lilklucb;

namespace {

double D(double p, double q) { return bernoulli_kl(Prob(p), Prob(q)).value(); }

double tilted(double p, double m, int n) { return detail::tilted_kl(p, m, n); }

}  // namespace

TEST_CASE("Prob rejects values outside the unit interval") {
  CHECK_THROWS_AS(Prob(-0.1), std::domain_error);
  CHECK_THROWS_AS(Prob(1.0000001), std::domain_error);
  CHECK_THROWS_AS(Prob(std::nan("")), std::domain_error);
  CHECK(Prob(0.0).value() == 0.0);
  CHECK(Prob(1.0).value() == 1.0);
}

TEST_CASE("Divergence allows infinity but not negatives") {
  CHECK_THROWS_AS(Divergence(-1e-300), std::domain_error);
  CHECK_THROWS_AS(Divergence(std::nan("")), std::domain_error);
  CHECK(Divergence::infinity().is_infinite());
  CHECK(Divergence(std::numeric_limits<double>::infinity()).is_infinite());
}

TEST_CASE("bernoulli_kl basic values") {
  CHECK(D(0.5, 0.5) == 0.0);
  CHECK(D(1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(D(0.0, 0.0) == 0.0);
  CHECK(D(1.0, 1.0) == 0.0);
  CHECK(D(0.0, 0.25) == doctest::Approx(-std::log(0.75)));
}

TEST_CASE("bernoulli_kl is infinite exactly at degenerate q") {
  CHECK(bernoulli_kl(Prob(0.3), Prob(0.0)).is_infinite());
  CHECK(bernoulli_kl(Prob(0.3), Prob(1.0)).is_infinite());
  CHECK(bernoulli_kl(Prob(1.0), Prob(0.0)).is_infinite());
  CHECK(bernoulli_kl(Prob(0.0), Prob(1.0)).is_infinite());
  CHECK_FALSE(bernoulli_kl(Prob(0.0), Prob(0.999)).is_infinite());
  CHECK_FALSE(bernoulli_kl(Prob(1.0), Prob(1e-9)).is_infinite());
}

TEST_CASE("bernoulli_kl(0.3, 0.7) against a 50-digit evaluation") {
  using big = boost::multiprecision::cpp_dec_float_50;
  const big p("0.3");
  const big q("0.7");
  const big exact = p * log(p / q) + (1 - p) * log((1 - p) / (1 - q));
  CHECK(std::abs(D(0.3, 0.7) - exact.convert_to<double>()) < 1e-15);
}

TEST_CASE("bernoulli_kl is strictly increasing in q on [p, 1]") {
  for (double p = 0.0; p <= 0.99; p += 0.03) {
    double prev = -1.0;
    for (int j = 0; j <= 200; ++j) {
      const double q = p + (1.0 - p) * j / 200.0 * 0.999;
      const double d = D(p, q);
      if (j > 0) CHECK(d > prev);
      prev = d;
    }
  }
}

TEST_CASE("upper and lower inverses: trivial budgets") {
  CHECK(kl_upper_inverse(Prob(0.5), Divergence(0.0)).value() == 0.5);
  CHECK(kl_lower_inverse(Prob(0.5), Divergence(0.0)).value() == 0.5);
  for (double p : {0.0, 0.2, 0.9, 1.0}) {
    CHECK(kl_upper_inverse(Prob(p), Divergence::infinity()).value() == 1.0);
    CHECK(kl_lower_inverse(Prob(p), Divergence::infinity()).value() == 0.0);
    CHECK(tilted_kl_upper_inverse(Prob(p), Divergence::infinity(), 8).value() == 1.0);
    CHECK(tilted_kl_lower_inverse(Prob(p), Divergence::infinity(), 8).value() == 0.0);
  }
  CHECK(tilted_kl_upper_inverse(Prob(0.5), Divergence(0.0), 8).value() == 0.5);
  CHECK(tilted_kl_lower_inverse(Prob(0.5), Divergence(0.0), 8).value() == 0.5);
}

TEST_CASE("inverse roundtrip examples") {
  const double up = kl_upper_inverse(Prob(0.5), Divergence(0.1)).value();
  CHECK(up > 0.5);
  CHECK(std::abs(D(0.5, up) - 0.1) <= 1e-9);
  const double lo = kl_lower_inverse(Prob(0.5), Divergence(0.1)).value();
  CHECK(lo < 0.5);
  CHECK(std::abs(D(0.5, lo) - 0.1) <= 1e-9);

  const double tu = tilted_kl_upper_inverse(Prob(0.3), Divergence(0.05), 8).value();
  CHECK(std::abs(D((8 * 0.3 + tu) / 9, tu) - 0.05) <= 1e-9);
  const double tl = tilted_kl_lower_inverse(Prob(0.3), Divergence(0.05), 8).value();
  CHECK(std::abs(D((8 * 0.3 + tl) / 9, tl) - 0.05) <= 1e-9);
}

TEST_CASE("inverse roundtrips on a grid land in [b - 1e-9, b]") {
  for (int i = 0; i <= 40; ++i) {
    const double p = i / 40.0;
    for (int j = 1; j <= 40; ++j) {
      const double frac = j / 41.0;
      if (p < 1.0) {
        const double b = frac * D(p, 1.0 - 1e-6);
        const double m = detail::kl_upper_inverse(p, b);
        const double d = D(p, m);
        CHECK(d <= b);
        CHECK(d >= b - 1e-9);
      }
      if (p > 0.0) {
        const double b = frac * D(p, 1e-6);
        const double m = detail::kl_lower_inverse(p, b);
        const double d = D(p, m);
        CHECK(d <= b);
        CHECK(d >= b - 1e-9);
      }
      for (int n : {1, 8, 64}) {
        if (p < 1.0) {
          const double b = frac * tilted(p, 1.0 - 1e-6, n);
          const auto r = detail::tilted_upper_inverse(p, b, n);
          const double d = tilted(p, r.value.value(), n);
          CHECK(r.monotone_scan);
          CHECK(d <= b);
          CHECK(d >= b - 1e-9);
        }
        if (p > 0.0) {
          const double b = frac * tilted(p, 1e-6, n);
          const auto r = detail::tilted_lower_inverse(p, b, n);
          const double d = tilted(p, r.value.value(), n);
          CHECK(r.monotone_scan);
          CHECK(d <= b);
          CHECK(d >= b - 1e-9);
        }
      }
    }
  }
}

TEST_CASE("budgets past the endpoint clamp to 0 and 1") {
  CHECK(kl_upper_inverse(Prob(0.5), Divergence(1e6)).value() >= 1.0 - 1e-15);
  CHECK(kl_upper_inverse(Prob(1.0), Divergence(0.3)).value() == 1.0);
  CHECK(kl_lower_inverse(Prob(0.0), Divergence(0.3)).value() == 0.0);
  // D(0.2, m) only diverges as m -> 0, so the answer is tiny but positive.
  const double low = kl_lower_inverse(Prob(0.2), Divergence(50.0)).value();
  CHECK(low > 0.0);
  CHECK(low <= 1e-12);
  CHECK(D(0.2, low) <= 50.0);
}

TEST_CASE("kl_upper_inverse is nondecreasing in the budget") {
  for (double p : {0.0, 0.05, 0.3, 0.5, 0.77, 0.95}) {
    double prev = p;
    for (int j = 0; j <= 300; ++j) {
      const double b = 0.01 * j;
      const double m = kl_upper_inverse(Prob(p), Divergence(b)).value();
      CHECK(m >= prev);
      prev = m;
      const double l = kl_lower_inverse(Prob(p), Divergence(b)).value();
      CHECK(l <= p);
    }
  }
}

TEST_CASE("tilted inverse is wider than the plain inverse at equal budget") {
  // The tilted argument sits between p and m, so it needs a larger m to spend
  // the same budget.
  for (double p : {0.1, 0.5, 0.8}) {
    for (double b : {0.001, 0.01, 0.1}) {
      CHECK(tilted_kl_upper_inverse(Prob(p), Divergence(b), 8).value() >=
            kl_upper_inverse(Prob(p), Divergence(b)).value());
      CHECK(tilted_kl_lower_inverse(Prob(p), Divergence(b), 8).value() <=
            kl_lower_inverse(Prob(p), Divergence(b)).value());
    }
  }
}

TEST_CASE("tilted_kl rejects N < 1") {
  CHECK_THROWS_AS((void)tilted_kl(Prob(0.2), Prob(0.3), 0), std::invalid_argument);
  CHECK_THROWS_AS((void)tilted_kl_upper_inverse(Prob(0.2), Divergence(0.1), 0), std::invalid_argument);
}

TEST_CASE("chernoff_information examples") {
  for (double mu : {0.0, 0.3, 1.0}) CHECK(chernoff_information(Prob(mu), Prob(mu)).value() == 0.0);

  const auto sym = chernoff_crossing(Prob(0.25), Prob(0.75));
  CHECK(sym.crossing.value() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sym.value.value() == doctest::Approx(D(0.5, 0.25)).epsilon(1e-12));

  const auto pt = chernoff_crossing(Prob(0.3), Prob(0.8));
  const double z = pt.crossing.value();
  CHECK(z > 0.3);
  CHECK(z < 0.8);
  CHECK(std::abs(D(z, 0.3) - D(z, 0.8)) <= 1e-10);
}

TEST_CASE("chernoff_information at the boundary") {
  CHECK(chernoff_information(Prob(0.0), Prob(1.0)).is_infinite());
  CHECK(chernoff_information(Prob(0.4), Prob(1.0)).value() == doctest::Approx(-std::log(0.4)));
  CHECK(chernoff_information(Prob(0.0), Prob(0.4)).value() == doctest::Approx(-std::log(0.6)));
}

TEST_CASE("chernoff_information equals the min-max characterization") {
  // D*(x, y) = min over z of max(D(z, x), D(z, y)). The max of two convex
  // functions is convex, so ternary search finds the minimum.
  for (double x : {0.05, 0.2, 0.5}) {
    for (double y : {0.6, 0.75, 0.97}) {
      const auto worst = [&](double z) { return std::max(D(z, x), D(z, y)); };
      double lo = x, hi = y;
      for (int it = 0; it < 300; ++it) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (worst(a) < worst(b)) hi = b; else lo = a;
      }
      const double best = worst(0.5 * (lo + hi));
      CHECK(chernoff_information(Prob(x), Prob(y)).value() == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("chernoff_information is symmetric and above both floors on the grid") {
  int pinsker_violations = 0;
  int floor_violations = 0;
  for (int i = 1; i <= 99; ++i) {
    for (int j = 1; j <= 99; ++j) {
      const double x = i / 100.0;
      const double y = j / 100.0;
      const double a = chernoff_information(Prob(x), Prob(y)).value();
      const double b = chernoff_information(Prob(y), Prob(x)).value();
      CHECK(a == b);
      if (a < (x - y) * (x - y) / 2.0 - 1e-12) ++pinsker_violations;
      if (j > i && a < chernoff_floor(Prob(x), y - x).value() - 1e-12) ++floor_violations;
    }
  }
  CHECK(pinsker_violations == 0);
  CHECK(floor_violations == 0);
}

TEST_CASE("chernoff_floor examples") {
  CHECK(chernoff_floor(Prob(0.4), 0.0).value() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(chernoff_floor(Prob(0.4), 1e-9).value() < 1e-15);
  for (double gap : {0.1, 0.5, 0.9}) {
    CHECK(chernoff_floor(Prob(0.0), gap).value() ==
          doctest::Approx(-0.5 * std::log(1.0 - gap)).epsilon(1e-13));
  }
  CHECK(chernoff_floor(Prob(0.2), 0.3).value() <= chernoff_information(Prob(0.2), Prob(0.5)).value());
  CHECK_THROWS_AS((void)chernoff_floor(Prob(0.7), 0.4), std::domain_error);
  CHECK_THROWS_AS((void)chernoff_floor(Prob(0.7), -0.1), std::domain_error);
}

TEST_CASE("random inverse requests come back within 1e-9") {
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double p = 0.999 * u(gen);
    const double b = u(gen) * D(p, 1.0 - 1e-6);
    CHECK(std::abs(D(p, detail::kl_upper_inverse(p, b)) - b) <= 1e-9);
  }
}
