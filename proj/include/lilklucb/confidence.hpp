#pragma once
// Anytime confidence sequences for the mean of [0, 1]-valued rewards.
//
// Four schemes share one interface:
//   kl_tilted  D((N mu_hat + m)/(N + 1), m) <= log(kappa log2(2t) / delta) / t
//   kl_prime   D(mu_hat, m) <= c(N) log(kappa log2(2t) / delta) / t
//   sg1        |mu_hat - m| <= sqrt(0.5 ((N + 1)/N)^2 log(kappa log2(2t) / delta) / t)
//   sg2        |mu_hat - m| <= sqrt((x + beta log log(e t)) / (2t))
// kappa = kappa(N, delta) normalises the peeling union bound so each one-sided
// sequence fails with probability at most delta over all t simultaneously.
// sg2 is the sub-Gaussian law-of-iterated-logarithm bound of Kaufmann, Cappe
// and Garivier (JMLR 2016, Theorem 8) with sigma^2 = 1/4; x solves
//   sqrt(e) zeta(beta (1 - 1/(2x))) (sqrt(x)/(2 sqrt 2) + 1)^beta exp(-x) = delta.

#include <cstdint>
#include <string_view>

#include "lilklucb/arm_stats.hpp"
#include "lilklucb/kl_math.hpp"

namespace lilklucb {

enum class SchemeKind { kl_tilted, kl_prime, sg1, sg2 };
enum class Side { upper, lower };

/// CLI names: "kl", "kl-prime", "sg1", "sg2".
[[nodiscard]] std::string_view scheme_name(SchemeKind kind) noexcept;
/// Throws std::invalid_argument on an unknown name.
[[nodiscard]] SchemeKind parse_scheme(std::string_view name);

[[nodiscard]] bool is_power_of_two(int n) noexcept;

/// Number of explicit terms in the tail sum of kappa before the integral
/// remainder takes over.
inline constexpr std::uint64_t kKappaExplicitTerms = 1'000'000;

/// The delta-free part of kappa:
///   sum_{t in [N]} 1{l != 0} log2(2t)^{-(N+1)/N} + N sum_{k >= l} (k + 1)^{-(N+1)/N},
/// N = 2^l. The k-sum runs explicitly to kKappaExplicitTerms and is closed
/// with the integral bound N (K + 1)^{-1/N}, so the result never undershoots.
/// Throws std::invalid_argument unless N is a power of two.
[[nodiscard]] double kappa_series(int n_tilt);

/// kappa(N, delta) = delta^{1/(N+1)} kappa_series(N)^{N/(N+1)}.
[[nodiscard]] double kappa(int n_tilt, double delta);

/// c(N) = (N + 1) / (N - ln(N + 1)).
[[nodiscard]] double c_of_n(int n_tilt);

/// Default confidence-sequence shape parameter beta of the sg2 bound.
inline constexpr double kSg2DefaultBeta = 2.0;

/// The sg2 deviation radius with its exploration constant solved once.
class Sg2Radius {
 public:
  explicit Sg2Radius(double delta, double beta = kSg2DefaultBeta);

  [[nodiscard]] double operator()(std::uint64_t t) const;
  [[nodiscard]] double exploration() const noexcept { return x_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// Left side of the defining equation of x, as a probability bound.
  [[nodiscard]] static double failure_probability(double x, double beta);

 private:
  double beta_;
  double x_;
};

[[nodiscard]] double sg2_radius(std::uint64_t t, double delta);

/// An immutable, fully precomputed confidence-sequence configuration.
class BoundScheme {
 public:
  /// Throws std::invalid_argument when delta is outside (0, 1) or N is not a
  /// power of two (N is ignored by sg2).
  explicit BoundScheme(SchemeKind kind, int n_tilt = 8, double delta = 0.01);

  /// Same kind and N at another confidence level; reuses the kappa series.
  [[nodiscard]] BoundScheme with_delta(double delta) const;

  [[nodiscard]] SchemeKind kind() const noexcept { return kind_; }
  [[nodiscard]] int n_tilt() const noexcept { return n_tilt_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }
  [[nodiscard]] double kappa() const noexcept { return kappa_; }
  [[nodiscard]] double c() const noexcept { return c_; }

  /// max(0, ln(kappa log2(2t) / delta)).
  [[nodiscard]] double log_term(std::uint64_t t) const;

  /// The divergence budget f_t: log_term / t for kl_tilted and sg1,
  /// c(N) log_term / t for kl_prime. sg2 has no divergence form and throws
  /// std::logic_error.
  [[nodiscard]] Divergence threshold(std::uint64_t t) const;

  /// Half-width of the sg1 / sg2 interval; throws std::logic_error for the
  /// KL kinds.
  [[nodiscard]] double radius(std::uint64_t t) const;

 private:
  BoundScheme(SchemeKind kind, int n_tilt, double delta, double series);

  SchemeKind kind_;
  int n_tilt_;
  double delta_;
  double series_ = 0.0;
  double kappa_ = 0.0;
  double c_ = 1.0;
  double sg2_x_ = 0.0;
  double sg2_beta_ = kSg2DefaultBeta;
};

/// The deviation sequence z_t of the anytime bound for a known mean mu.
/// kl_tilted solves D(mu +- N/(N+1) z, mu) = f_t and kl_prime solves
/// D(mu +- z, mu) = c(N) f_t, both over z in (0, 1 - mu] (upper) or (0, mu]
/// (lower); when no solution exists the boundary value is returned.
/// Throws std::invalid_argument for the sub-Gaussian kinds.
[[nodiscard]] double deviation_z(const BoundScheme& scheme, Prob mu, std::uint64_t t, Side side);

/// Upper / lower confidence bound on the mean of an arm. Throws
/// std::invalid_argument when the arm has no pulls.
[[nodiscard]] Prob upper_bound(const BoundScheme& scheme, const ArmStats& stats);
[[nodiscard]] Prob lower_bound(const BoundScheme& scheme, const ArmStats& stats);

/// Whether `mu` lies on the covered side of the one-sided bound, decided
/// from the defining inequality without inverting it: for side = upper this
/// is mu <= upper_bound, for side = lower mu >= lower_bound.
[[nodiscard]] bool covers(const BoundScheme& scheme, const ArmStats& stats, double mu, Side side);

}  // namespace lilklucb
