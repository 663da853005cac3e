#pragma once
// Bernoulli relative entropy, its inverses, and Chernoff information.
//
// Every routine here is a pure function. Probabilities are carried in the
// checked `Prob` type and divergences in `Divergence`; the `detail` namespace
// exposes unchecked double versions for inner loops that already hold valid
// values.

#include <limits>

namespace lilklucb {

/// A probability in [0, 1]. Construction from NaN or an out-of-range value
/// throws std::domain_error.
class Prob {
 public:
  constexpr Prob() = default;
  explicit Prob(double value);

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  friend constexpr auto operator<=>(Prob, Prob) = default;

 private:
  double value_ = 0.0;
};

/// A non-negative divergence; +infinity is a legal value.
class Divergence {
 public:
  constexpr Divergence() = default;
  explicit Divergence(double value);

  static constexpr Divergence infinity() noexcept {
    Divergence d;
    d.value_ = std::numeric_limits<double>::infinity();
    return d;
  }

  [[nodiscard]] constexpr double value() const noexcept { return value_; }
  [[nodiscard]] bool is_infinite() const noexcept;
  friend constexpr auto operator<=>(Divergence, Divergence) = default;

 private:
  double value_ = 0.0;
};

/// Bisection cap shared by every solver in the library.
inline constexpr int kMaxBisectionIterations = 200;
/// Grid size of the monotonicity pre-scan run before a tilted inversion.
inline constexpr int kTiltedScanPoints = 64;

/// D(p, q) = p log(p/q) + (1-p) log((1-p)/(1-q)), natural log, 0 log 0 = 0.
/// Infinite iff (q = 0 and p > 0) or (q = 1 and p < 1).
[[nodiscard]] Divergence bernoulli_kl(Prob p, Prob q);

/// sup { m >= p : D(p, m) <= bound }.
[[nodiscard]] Prob kl_upper_inverse(Prob p, Divergence bound);
/// inf { m <= p : D(p, m) <= bound }.
[[nodiscard]] Prob kl_lower_inverse(Prob p, Divergence bound);

/// D((N p + m) / (N + 1), m), the divergence that defines the tilted bounds.
[[nodiscard]] Divergence tilted_kl(Prob p, Prob m, int n_tilt);

struct TiltedInverse {
  Prob value;
  // False when the 64-point pre-scan saw the tilted divergence decrease; the
  // sup was then bracketed from the last feasible scan point.
  bool monotone_scan = true;
};

/// sup { m >= p : D((N p + m)/(N + 1), m) <= bound }. Throws
/// std::invalid_argument when n_tilt < 1.
[[nodiscard]] TiltedInverse tilted_kl_upper_inverse_checked(Prob p, Divergence bound, int n_tilt);
/// inf { m <= p : D((N p + m)/(N + 1), m) <= bound }.
[[nodiscard]] TiltedInverse tilted_kl_lower_inverse_checked(Prob p, Divergence bound, int n_tilt);

[[nodiscard]] inline Prob tilted_kl_upper_inverse(Prob p, Divergence bound, int n_tilt) {
  return tilted_kl_upper_inverse_checked(p, bound, n_tilt).value;
}
[[nodiscard]] inline Prob tilted_kl_lower_inverse(Prob p, Divergence bound, int n_tilt) {
  return tilted_kl_lower_inverse_checked(p, bound, n_tilt).value;
}

struct ChernoffPoint {
  Prob crossing;       // z* with D(z*, a) = D(z*, b)
  Divergence value;    // D(z*, a)
};

/// Chernoff information between Ber(x) and Ber(y), together with the crossing
/// point. Symmetric in its arguments. When one endpoint is degenerate (0 or 1)
/// the crossing sits on that endpoint and the value is the limiting D.
[[nodiscard]] ChernoffPoint chernoff_crossing(Prob x, Prob y);
[[nodiscard]] Divergence chernoff_information(Prob x, Prob y);

/// log 1 / (sqrt(mu (mu + gap)) + sqrt((1 - mu)(1 - mu - gap))), a closed-form
/// lower bound on chernoff_information(mu, mu + gap). Throws
/// std::domain_error when gap < 0 or mu + gap > 1.
[[nodiscard]] Divergence chernoff_floor(Prob mu, double gap);

namespace detail {

[[nodiscard]] double kl(double p, double q) noexcept;
[[nodiscard]] double tilted_kl(double p, double m, int n_tilt) noexcept;
[[nodiscard]] double kl_upper_inverse(double p, double bound) noexcept;
[[nodiscard]] double kl_lower_inverse(double p, double bound) noexcept;
[[nodiscard]] TiltedInverse tilted_upper_inverse(double p, double bound, int n_tilt) noexcept;
[[nodiscard]] TiltedInverse tilted_lower_inverse(double p, double bound, int n_tilt) noexcept;

// Bisects between a point known to satisfy `feasible` and one known not to,
// until the two are adjacent doubles or the iteration cap is reached. Returns
// the feasible end. Works in either direction.
template <class Feasible>
[[nodiscard]] double bisect_boundary(Feasible&& feasible, double inside, double outside) {
  for (int i = 0; i < kMaxBisectionIterations; ++i) {
    const double mid = inside + (outside - inside) / 2.0;
    if (mid == inside || mid == outside) break;
    if (feasible(mid)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return inside;
}

}  // namespace detail
}  // namespace lilklucb
