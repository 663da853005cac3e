#pragma once
// Reward-generating processes for bandit runs.

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "lilklucb/data_ingest.hpp"
#include "lilklucb/kl_math.hpp"
#include "lilklucb/rng.hpp"

namespace lilklucb {

struct BernoulliArm {
  double p;
};

struct DiscreteArm {
  std::vector<double> support;
  std::vector<double> cumulative;  // running sum of the weights, last entry 1
};

struct BootstrapArm {
  std::vector<double> pool;
};

/// One arm's reward law. All factories validate support in [0, 1].
class ArmDistribution {
 public:
  static ArmDistribution bernoulli(double p);
  /// Weights must be non-negative and sum to 1 within 1e-12.
  static ArmDistribution discrete(std::vector<double> support, const std::vector<double>& weights);
  /// Resampled uniformly with replacement; the pool must be non-empty.
  static ArmDistribution bootstrap(std::vector<double> pool);

  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double sample(Rng& rng) const;
  [[nodiscard]] const std::variant<BernoulliArm, DiscreteArm, BootstrapArm>& kind() const noexcept {
    return kind_;
  }

 private:
  ArmDistribution(std::variant<BernoulliArm, DiscreteArm, BootstrapArm> kind, double mean)
      : kind_(std::move(kind)), mean_(mean) {}

  std::variant<BernoulliArm, DiscreteArm, BootstrapArm> kind_;
  double mean_;
};

/// A bandit instance. Arm 0 is the unique best arm and the true means are
/// non-increasing. The environment owns a reward stream seeded by `seed`; runs
/// that need independent streams should use with_seed().
class Environment {
 public:
  /// Throws std::invalid_argument for fewer than 2 arms, means out of order,
  /// or a tie at the top.
  Environment(std::vector<ArmDistribution> arms, std::uint64_t seed = 0);

  [[nodiscard]] std::size_t size() const noexcept { return arms_.size(); }
  [[nodiscard]] const std::vector<Prob>& true_means() const noexcept { return means_; }
  [[nodiscard]] const ArmDistribution& arm(std::size_t i) const { return arms_.at(i); }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  /// Same arms, fresh stream.
  [[nodiscard]] Environment with_seed(std::uint64_t seed) const;

  /// Draws the next reward of `arm`; throws std::out_of_range on a bad index.
  double sample(std::size_t arm);

 private:
  std::vector<ArmDistribution> arms_;
  std::vector<Prob> means_;
  std::uint64_t seed_;
  Rng rng_;
};

/// mu_i = 1 - ((i - 1)/n)^alpha for i = 1..n.
[[nodiscard]] std::vector<Prob> parametric_means(int n, double alpha);
/// Delta_i = (i/n)^alpha for i = 1..n.
[[nodiscard]] std::vector<double> gap_family(int n, double alpha);

/// Bernoulli arms with the given means, which must already be sorted.
[[nodiscard]] Environment bernoulli_environment(const std::vector<Prob>& means,
                                                std::uint64_t seed = 0);

/// Reward assigned to a 1-, 2- and 3-star vote.
using StarMap = std::array<double, 3>;
inline constexpr StarMap kDefaultStarMap{0.0, 0.5, 1.0};

/// Per-caption bootstrap arms sorted by pool mean (stable, descending).
/// Throws std::invalid_argument for a caption without votes, map values
/// outside [0, 1], or a tie between the two best pool means.
[[nodiscard]] Environment from_contest(const ContestDataset& dataset,
                                       const StarMap& star_map = kDefaultStarMap,
                                       std::uint64_t seed = 0);

}  // namespace lilklucb
