#include "lilklucb/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lilklucb {

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

}  // namespace

ArmDistribution ArmDistribution::bernoulli(double p) {
  check_unit(p, "Bernoulli parameter");
  return ArmDistribution(BernoulliArm{p}, p);
}

ArmDistribution ArmDistribution::discrete(std::vector<double> support,
                                          const std::vector<double>& weights) {
  if (support.empty() || support.size() != weights.size()) {
    throw std::invalid_argument("discrete arm needs matching, non-empty support and weights");
  }
  double total = 0.0;
  double mean = 0.0;
  std::vector<double> cumulative;
  cumulative.reserve(weights.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    check_unit(support[i], "support value");
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("discrete weights must be non-negative");
    total += weights[i];
    mean += weights[i] * support[i];
    cumulative.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete weights must sum to 1, got " + std::to_string(total));
  }
  cumulative.back() = 1.0;
  return ArmDistribution(DiscreteArm{std::move(support), std::move(cumulative)},
                         std::clamp(mean, 0.0, 1.0));
}

ArmDistribution ArmDistribution::bootstrap(std::vector<double> pool) {
  if (pool.empty()) throw std::invalid_argument("bootstrap pool is empty");
  for (double v : pool) check_unit(v, "bootstrap value");
  const double mean = std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
  return ArmDistribution(BootstrapArm{std::move(pool)}, std::clamp(mean, 0.0, 1.0));
}

double ArmDistribution::sample(Rng& rng) const {
  struct Visitor {
    Rng& rng;
    double operator()(const BernoulliArm& a) const { return rng.bernoulli(a.p) ? 1.0 : 0.0; }
    double operator()(const DiscreteArm& a) const {
      const double u = rng.uniform();
      const auto it = std::upper_bound(a.cumulative.begin(), a.cumulative.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - a.cumulative.begin()),
                                             a.support.size() - 1);
      return a.support[idx];
    }
    double operator()(const BootstrapArm& a) const { return a.pool[rng.below(a.pool.size())]; }
  };
  return std::visit(Visitor{rng}, kind_);
}

Environment::Environment(std::vector<ArmDistribution> arms, std::uint64_t seed)
    : arms_(std::move(arms)), seed_(seed), rng_(seed) {
  if (arms_.size() < 2) throw std::invalid_argument("an environment needs at least 2 arms");
  means_.reserve(arms_.size());
  for (const auto& a : arms_) means_.emplace_back(a.mean());
  for (std::size_t i = 1; i < means_.size(); ++i) {
    if (means_[i] > means_[i - 1]) {
      throw std::invalid_argument("arm means must be sorted in non-increasing order");
    }
  }
  if (!(means_[0] > means_[1])) throw std::invalid_argument("the best arm is not unique");
}

Environment Environment::with_seed(std::uint64_t seed) const { return Environment(arms_, seed); }

double Environment::sample(std::size_t arm) {
  if (arm >= arms_.size()) {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range");
  }
  return arms_[arm].sample(rng_);
}

namespace {

void check_family(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(alpha > 0.0) || std::isinf(alpha)) throw std::invalid_argument("alpha must be positive");
}

}  // namespace

std::vector<Prob> parametric_means(int n, double alpha) {
  check_family(n, alpha);
  std::vector<Prob> mus;
  mus.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    mus.emplace_back(1.0 - std::pow(static_cast<double>(i - 1) / n, alpha));
  }
  return mus;
}

std::vector<double> gap_family(int n, double alpha) {
  check_family(n, alpha);
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) gaps.push_back(std::pow(static_cast<double>(i) / n, alpha));
  return gaps;
}

Environment bernoulli_environment(const std::vector<Prob>& means, std::uint64_t seed) {
  std::vector<ArmDistribution> arms;
  arms.reserve(means.size());
  for (Prob m : means) arms.push_back(ArmDistribution::bernoulli(m.value()));
  return Environment(std::move(arms), seed);
}

Environment from_contest(const ContestDataset& dataset, const StarMap& star_map,
                         std::uint64_t seed) {
  for (double v : star_map) check_unit(v, "star map value");
  std::vector<ArmDistribution> arms;
  arms.reserve(dataset.captions.size());
  for (const auto& caption : dataset.captions) {
    if (caption.total_votes() == 0) {
      throw std::invalid_argument("caption '" + caption.text + "' has no votes");
    }
    std::vector<double> pool;
    pool.reserve(caption.total_votes());
    for (std::size_t s = 0; s < 3; ++s) pool.insert(pool.end(), caption.star_counts[s], star_map[s]);
    arms.push_back(ArmDistribution::bootstrap(std::move(pool)));
  }
  if (arms.size() < 2) throw std::invalid_argument("a contest needs at least 2 captions");
  std::stable_sort(arms.begin(), arms.end(),
                   [](const ArmDistribution& a, const ArmDistribution& b) { return a.mean() > b.mean(); });
  if (arms[0].mean() - arms[1].mean() <= 1e-12) {
    throw std::invalid_argument("the two best captions have equal mean rating");
  }
  return Environment(std::move(arms), seed);
}

}  // namespace lilklucb
