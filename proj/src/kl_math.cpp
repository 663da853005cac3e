#include "lilklucb/kl_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lilklucb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Prob::Prob(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::domain_error("probability must lie in [0, 1], got " + std::to_string(value));
  }
}

Divergence::Divergence(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0) {
    throw std::domain_error("divergence must be non-negative, got " + std::to_string(value));
  }
}

bool Divergence::is_infinite() const noexcept { return std::isinf(value_); }

namespace detail {

double kl(double p, double q) noexcept {
  double d = 0.0;
  if (p > 0.0) {
    if (q <= 0.0) return kInf;
    d += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q >= 1.0) return kInf;
    d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return d > 0.0 ? d : 0.0;
}

double tilted_kl(double p, double m, int n_tilt) noexcept {
  const double n = static_cast<double>(n_tilt);
  const double mixed = std::clamp((n * p + m) / (n + 1.0), 0.0, 1.0);
  return kl(mixed, m);
}

double kl_upper_inverse(double p, double bound) noexcept {
  if (!(bound > 0.0)) return p;
  if (p >= 1.0 || std::isinf(bound) || kl(p, 1.0) <= bound) return 1.0;
  return bisect_boundary([&](double m) { return kl(p, m) <= bound; }, p, 1.0);
}

double kl_lower_inverse(double p, double bound) noexcept {
  if (!(bound > 0.0)) return p;
  if (p <= 0.0 || std::isinf(bound) || kl(p, 0.0) <= bound) return 0.0;
  return bisect_boundary([&](double m) { return kl(p, m) <= bound; }, p, 0.0);
}

namespace {

// Walks from p towards `end` on a uniform grid, records whether the tilted
// divergence never decreased, and brackets the last feasible grid point.
TiltedInverse tilted_inverse(double p, double bound, int n_tilt, double end) {
  const double step = (end - p) / kTiltedScanPoints;
  double prev = 0.0;
  double inside = p;
  double outside = end;
  bool monotone = true;
  bool bracketed = false;
  for (int k = 1; k <= kTiltedScanPoints; ++k) {
    const double m = (k == kTiltedScanPoints) ? end : p + step * k;
    const double g = tilted_kl(p, m, n_tilt);
    if (g < prev) monotone = false;
    prev = g;
    if (g <= bound) {
      inside = m;
      bracketed = false;
    } else if (!bracketed) {
      outside = m;
      bracketed = true;
    }
  }
  if (!bracketed) return {Prob(end), monotone};
  const double v = bisect_boundary(
      [&](double m) { return tilted_kl(p, m, n_tilt) <= bound; }, inside, outside);
  return {Prob(v), monotone};
}

}  // namespace

TiltedInverse tilted_upper_inverse(double p, double bound, int n_tilt) noexcept {
  if (!(bound > 0.0)) return {Prob(p), true};
  if (p >= 1.0 || std::isinf(bound)) return {Prob(1.0), true};
  return tilted_inverse(p, bound, n_tilt, 1.0);
}

TiltedInverse tilted_lower_inverse(double p, double bound, int n_tilt) noexcept {
  if (!(bound > 0.0)) return {Prob(p), true};
  if (p <= 0.0 || std::isinf(bound)) return {Prob(0.0), true};
  return tilted_inverse(p, bound, n_tilt, 0.0);
}

}  // namespace detail

Divergence bernoulli_kl(Prob p, Prob q) { return Divergence(detail::kl(p.value(), q.value())); }

Prob kl_upper_inverse(Prob p, Divergence bound) {
  return Prob(detail::kl_upper_inverse(p.value(), bound.value()));
}

Prob kl_lower_inverse(Prob p, Divergence bound) {
  return Prob(detail::kl_lower_inverse(p.value(), bound.value()));
}

Divergence tilted_kl(Prob p, Prob m, int n_tilt) {
  if (n_tilt < 1) throw std::invalid_argument("tilt parameter N must be >= 1");
  return Divergence(detail::tilted_kl(p.value(), m.value(), n_tilt));
}

TiltedInverse tilted_kl_upper_inverse_checked(Prob p, Divergence bound, int n_tilt) {
  if (n_tilt < 1) throw std::invalid_argument("tilt parameter N must be >= 1");
  return detail::tilted_upper_inverse(p.value(), bound.value(), n_tilt);
}

TiltedInverse tilted_kl_lower_inverse_checked(Prob p, Divergence bound, int n_tilt) {
  if (n_tilt < 1) throw std::invalid_argument("tilt parameter N must be >= 1");
  return detail::tilted_lower_inverse(p.value(), bound.value(), n_tilt);
}

ChernoffPoint chernoff_crossing(Prob x, Prob y) {
  const double a = std::min(x.value(), y.value());
  const double b = std::max(x.value(), y.value());
  if (a == b) return {Prob(a), Divergence(0.0)};
  if (a == 0.0 && b == 1.0) return {Prob(0.5), Divergence::infinity()};
  // A degenerate endpoint pulls the crossing onto itself.
  if (b == 1.0) return {Prob(1.0), Divergence(detail::kl(1.0, a))};
  if (a == 0.0) return {Prob(0.0), Divergence(detail::kl(0.0, b))};

  // D(z, a) - D(z, b) increases strictly on (a, b), negative at a, positive at b.
  const double z = detail::bisect_boundary(
      [&](double t) { return detail::kl(t, a) < detail::kl(t, b); }, a, b);
  return {Prob(z), Divergence(detail::kl(z, a))};
}

Divergence chernoff_information(Prob x, Prob y) { return chernoff_crossing(x, y).value; }

Divergence chernoff_floor(Prob mu, double gap) {
  const double m = mu.value();
  if (std::isnan(gap) || gap < 0.0 || m + gap > 1.0 + 1e-12) {
    throw std::domain_error("chernoff_floor requires 0 <= gap <= 1 - mu");
  }
  const double hi = std::min(1.0, m + gap);
  const double s = std::sqrt(m * hi) + std::sqrt((1.0 - m) * (1.0 - hi));
  if (s <= 0.0) return Divergence::infinity();
  return Divergence(std::max(0.0, -std::log(s)));
}

}  // namespace lilklucb
