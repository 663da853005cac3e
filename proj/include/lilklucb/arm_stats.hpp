#pragma once

#include <cstdint>
#include <stdexcept>

namespace lilklucb {

/// Pull count T_i(t) and reward sum of one arm. Rewards lie in [0, 1], so
/// 0 <= reward_sum <= pulls always holds.
struct ArmStats {
  std::uint64_t pulls = 0;
  double reward_sum = 0.0;

  void add(double reward) {
    if (!(reward >= 0.0 && reward <= 1.0)) {
      throw std::domain_error("reward outside [0, 1]");
    }
    ++pulls;
    reward_sum += reward;
  }

  /// Empirical mean; 0 for an arm that has never been pulled.
  [[nodiscard]] double mean() const noexcept {
    if (pulls == 0) return 0.0;
    const double m = reward_sum / static_cast<double>(pulls);
    return m > 1.0 ? 1.0 : m;
  }

  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

}  // namespace lilklucb
