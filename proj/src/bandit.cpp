#include "lilklucb/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "max_tree.hpp"

namespace lilklucb {

std::size_t top_index(const std::vector<ArmStats>& stats, Rng& rng) {
  if (stats.empty()) throw std::invalid_argument("top_index of no arms");
  double best = -1.0;
  std::uint64_t ties = 0;
  for (const auto& s : stats) {
    if (s.pulls == 0) throw std::invalid_argument("top_index: an arm has no pulls");
    const double m = s.mean();
    if (m > best) {
      best = m;
      ties = 1;
    } else if (m == best) {
      ++ties;
    }
  }
  std::uint64_t pick = ties > 1 ? rng.below(ties) : 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (stats[i].mean() == best && pick-- == 0) return i;
  }
  throw std::logic_error("top_index: unreachable");
}

namespace {

std::size_t random_tied_max(const detail::MaxTree& tree, Rng& rng) {
  const std::uint64_t ties = tree.ties();
  return tree.select(ties > 1 ? rng.below(ties) : 0);
}

RunRecord finish(const std::vector<ArmStats>& stats, std::size_t recommended, bool stopped,
                 std::uint64_t seed) {
  RunRecord rec;
  rec.recommended = recommended;
  rec.stopped = stopped;
  rec.seed = seed;
  rec.per_arm_pulls.reserve(stats.size());
  for (const auto& s : stats) {
    rec.per_arm_pulls.push_back(s.pulls);
    rec.total_samples += s.pulls;
  }
  return rec;
}

}  // namespace

RunRecord lil_klucb(Environment& env, const BoundScheme& scheme,
                    std::optional<std::uint64_t> budget, Rng& rng) {
  const std::size_t n = env.size();
  if (n < 2) throw std::invalid_argument("lil_klucb needs at least 2 arms");
  const BoundScheme top_scheme = scheme.with_delta(scheme.delta() / static_cast<double>(n - 1));

  std::vector<ArmStats> stats(n);
  std::vector<double> lower(n);
  detail::MaxTree means(n);
  detail::MaxTree upper(n);
  auto pull = [&](std::size_t i) {
    stats[i].add(env.sample(i));
    means.set(i, stats[i].mean());
    upper.set(i, upper_bound(scheme, stats[i]).value());
    lower[i] = lower_bound(top_scheme, stats[i]).value();
  };

  for (std::size_t i = 0; i < n; ++i) pull(i);
  std::uint64_t total = n;

  for (;;) {
    const std::size_t top = random_tied_max(means, rng);
    const double top_upper = upper.get(top);
    upper.set(top, -std::numeric_limits<double>::infinity());
    const std::size_t rival = upper.select(0);
    const double rival_upper = upper.max();
    upper.set(top, top_upper);

    if (lower[top] > rival_upper) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i != top && !(lower[top] > upper.get(i))) {
          throw std::logic_error("stopping rule fired while bounds overlap");
        }
      }
      return finish(stats, top, true, env.seed());
    }
    if (budget && total + 2 > *budget) return finish(stats, top, false, env.seed());
    pull(top);
    pull(rival);
    total += 2;
  }
}

RunRecord ucb_race(Environment& env, const BoundScheme& scheme, std::uint64_t budget,
                   std::uint64_t snapshot_every, std::size_t k, Rng& rng) {
  const std::size_t n = env.size();
  if (k < 1 || k > n) {
    throw std::invalid_argument("k must lie in [1, " + std::to_string(n) + "], got " +
                                std::to_string(k));
  }
  if (budget < n) throw std::invalid_argument("budget must be at least the number of arms");
  if (snapshot_every < 1) throw std::invalid_argument("snapshot interval must be >= 1");

  std::vector<ArmStats> stats(n);
  detail::MaxTree upper(n);
  auto pull = [&](std::size_t i) {
    stats[i].add(env.sample(i));
    upper.set(i, upper_bound(scheme, stats[i]).value());
  };

  std::vector<Snapshot> snapshots;
  auto snapshot = [&](std::uint64_t total) {
    const double best = stats[0].mean();
    std::size_t greater = 0;
    std::size_t ties = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const double m = stats[i].mean();
      if (m > best) ++greater;
      else if (m == best) ++ties;
    }
    bool member;
    if (greater >= k) member = false;
    else if (greater + ties < k) member = true;
    else member = greater + rng.below(ties + 1) < k;
    snapshots.push_back({total, member});
  };

  for (std::size_t i = 0; i < n; ++i) pull(i);
  std::uint64_t total = n;
  snapshot(total);
  std::uint64_t next = n + snapshot_every;
  while (total < budget) {
    pull(random_tied_max(upper, rng));
    ++total;
    if (total == next || total == budget) {
      snapshot(total);
      if (total == next) next += snapshot_every;
    }
  }

  RunRecord rec = finish(stats, 0, false, env.seed());
  rec.recommended = top_index(stats, rng);
  rec.snapshots = std::move(snapshots);
  return rec;
}

std::uint64_t first_crossing(const BoundScheme& scheme, double target) {
  if (!(target > 0.0)) throw std::invalid_argument("crossing target must be positive");
  auto below = [&](std::uint64_t t) { return scheme.threshold(t).value() < target; };
  if (below(1)) return 1;
  std::uint64_t lo = 1;  // threshold(lo) >= target
  std::uint64_t hi = 2;
  while (!below(hi)) {
    lo = hi;
    if (hi > (std::numeric_limits<std::uint64_t>::max() >> 2)) {
      throw std::overflow_error("threshold never drops below the target");
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (below(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

ComplexityBound predicted_complexity(const std::vector<Prob>& mus, double delta, int grid_points,
                                     const BoundScheme& schedule) {
  const std::size_t n = mus.size();
  if (n < 2) throw std::invalid_argument("need at least 2 arms");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (grid_points < 3) throw std::invalid_argument("grid_points must be >= 3");
  for (std::size_t i = 1; i < n; ++i) {
    if (mus[i] > mus[i - 1]) throw std::invalid_argument("means must be sorted in descending order");
  }
  const double mu1 = mus[0].value();
  const double mu2 = mus[1].value();
  if (!(mu1 > mu2)) throw std::invalid_argument("the best mean must be strictly largest");

  auto term = [](double scale, double d) {
    const double loglog = std::max(1.0, std::log(1.0 / d));
    return std::log(scale * loglog) / d;
  };
  const double inv_delta = 1.0 / delta;
  const double nm1 = static_cast<double>(n - 1);

  double best_total = std::numeric_limits<double>::infinity();
  double best_m = mu2;
  for (int j = 1; j <= grid_points; ++j) {
    const double m = mu2 + (mu1 - mu2) * j / (grid_points + 1.0);
    if (!(m > mu2 && m < mu1)) continue;
    double total = term(nm1 * inv_delta, chernoff_information(mus[0], Prob(m)).value());
    for (std::size_t i = 1; i < n; ++i) {
      total += term(inv_delta, chernoff_information(mus[i], Prob(m)).value());
    }
    if (total < best_total) {
      best_total = total;
      best_m = m;
    }
  }
  if (!std::isfinite(best_total)) throw std::invalid_argument("means too close to grid the bound");

  ComplexityBound out;
  const Prob witness(best_m);
  const BoundScheme arm_schedule = schedule.with_delta(delta * delta);
  const BoundScheme best_schedule = schedule.with_delta(delta * delta / nm1);
  const double d1 = chernoff_information(mus[0], witness).value();
  out.best_arm_term = term(nm1 * inv_delta, d1);
  out.best_arm_stopping_index = first_crossing(best_schedule, d1);
  out.total = out.best_arm_term;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = chernoff_information(mus[i], witness).value();
    out.per_arm_terms.push_back(term(inv_delta, d));
    out.witness_mus.push_back(best_m);
    out.stopping_indices.push_back(first_crossing(arm_schedule, d));
    out.total += out.per_arm_terms.back();
  }
  return out;
}

}  // namespace lilklucb
