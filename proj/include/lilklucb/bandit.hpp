#pragma once
// Best-arm identification with lil-KLUCB, a fixed-budget UCB race, and the
// sample-complexity bound of lil-KLUCB.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lilklucb/arm_stats.hpp"
#include "lilklucb/confidence.hpp"
#include "lilklucb/environments.hpp"
#include "lilklucb/rng.hpp"

namespace lilklucb {

struct Snapshot {
  std::uint64_t total_samples = 0;
  bool best_in_top_k = false;  // arm 0 among the k best empirical means

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct RunRecord {
  std::size_t recommended = 0;
  std::uint64_t total_samples = 0;
  std::vector<std::uint64_t> per_arm_pulls;
  bool stopped = false;
  std::vector<Snapshot> snapshots;
  std::uint64_t seed = 0;  // the environment's stream seed

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Arm with the highest empirical mean, exact ties broken uniformly with
/// `rng`. Throws std::invalid_argument if the vector is empty or an arm has
/// no pulls.
[[nodiscard]] std::size_t top_index(const std::vector<ArmStats>& stats, Rng& rng);

/// lil-KLUCB. Samples every arm once, then each round stops if the lower
/// bound of TOP at delta/(n-1) exceeds every other arm's upper bound at
/// delta, and otherwise pulls TOP and the rival with the largest upper bound
/// (lowest index on ties). With a budget, the run ends unstopped as soon as
/// another round would exceed it. The scheme must be a KL or sg1/sg2 scheme
/// at the target delta.
[[nodiscard]] RunRecord lil_klucb(Environment& env, const BoundScheme& scheme,
                                  std::optional<std::uint64_t> budget, Rng& rng);

/// Pure UCB: after one pull per arm, each step pulls an arm with the largest
/// upper bound (ties uniform). A snapshot is taken at n, n + s, n + 2s, ...
/// and at the budget. Throws std::invalid_argument if budget < n, k < 1,
/// k > n or snapshot_every < 1.
[[nodiscard]] RunRecord ucb_race(Environment& env, const BoundScheme& scheme, std::uint64_t budget,
                                 std::uint64_t snapshot_every, std::size_t k, Rng& rng);

/// Sample-complexity bound of lil-KLUCB with the universal constant set to 1.
struct ComplexityBound {
  std::vector<double> per_arm_terms;  // arms 2..n
  double best_arm_term = 0.0;
  double total = 0.0;
  std::vector<double> witness_mus;  // the minimizing mu~_i, arms 2..n

  /// First t with threshold(t) < D*(mu_i, mu~_i) at confidence delta^2, arms
  /// 2..n; and the same for arm 1 against D*(mu_1, mu~) at delta^2/(n-1).
  std::vector<std::uint64_t> stopping_indices;
  std::uint64_t best_arm_stopping_index = 0;
};

/// Minimizes the bound over mu~ on a grid of `grid_points` interior points of
/// (mu_2, mu_1). Every term shrinks as its mu~_i moves up, so the minimizer
/// takes all mu~_i equal to mu~. The log log factor is floored at 1. The
/// threshold schedule comes from `schedule` (its delta is replaced).
/// Throws std::invalid_argument for unsorted means, mu_1 = mu_2, fewer than
/// 2 arms, delta outside (0, 1) or grid_points < 3.
[[nodiscard]] ComplexityBound predicted_complexity(
    const std::vector<Prob>& mus, double delta, int grid_points,
    const BoundScheme& schedule = BoundScheme(SchemeKind::kl_prime, 8, 0.01));

/// Smallest t >= 1 with scheme.threshold(t) < target; assumes the threshold
/// sequence decreases once it first drops below target. Throws
/// std::invalid_argument unless target > 0.
[[nodiscard]] std::uint64_t first_crossing(const BoundScheme& scheme, double target);

}  // namespace lilklucb
