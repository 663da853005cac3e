#include "lilklucb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "lilklucb/bandit.hpp"

namespace lilklucb {

std::string_view command_name(Command c) noexcept {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::replay: return "replay";
    case Command::identify: return "identify";
    case Command::table1: return "table1";
    case Command::coverage: return "coverage";
  }
  return "unknown";
}

const std::vector<std::string>& option_names() {
  static const std::vector<std::string> names{
      "scheme", "bound-n", "delta",  "n",      "alpha",  "mus",     "budget",
      "reps",   "k",       "seed",   "snapshot-every",   "grid-points", "input",
      "output", "format",  "parallel", "columns", "star-map"};
  return names;
}

namespace {

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(',', start);
    std::string_view part = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    parts.push_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("--" + std::string(key) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (auto part : split_list(text)) out.push_back(parse_value<T>(key, part));
  return out;
}

}  // namespace

RunConfig config_from_options(Command command, const std::map<std::string, std::string>& options) {
  RunConfig c;
  c.command = command;
  switch (command) {
    case Command::simulate:
    case Command::replay:
      c.schemes = {SchemeKind::kl_tilted, SchemeKind::sg1, SchemeKind::sg2};
      break;
    case Command::identify: c.schemes = {SchemeKind::kl_prime}; break;
    case Command::coverage:
      c.schemes = {SchemeKind::kl_tilted, SchemeKind::kl_prime, SchemeKind::sg1};
      c.budget = 10'000;
      break;
    case Command::table1: break;
  }

  const auto& known = option_names();
  for (const auto& [key, value] : options) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown option '" + key + "'");
    }
    if (key == "scheme") {
      c.schemes.clear();
      for (auto name : split_list(value)) {
        try {
          c.schemes.push_back(parse_scheme(name));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("--scheme: ") + e.what());
        }
      }
    } else if (key == "bound-n") {
      c.bound_n = parse_value<int>(key, value);
    } else if (key == "delta") {
      c.delta = parse_value<double>(key, value);
    } else if (key == "n") {
      c.n = parse_list<int>(key, value);
    } else if (key == "alpha") {
      c.alpha = parse_list<double>(key, value);
    } else if (key == "mus") {
      c.mus = parse_list<double>(key, value);
    } else if (key == "budget") {
      c.budget = parse_value<std::uint64_t>(key, value);
    } else if (key == "reps") {
      c.reps = parse_value<std::uint64_t>(key, value);
    } else if (key == "k") {
      c.k = parse_value<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "snapshot-every") {
      c.snapshot_every = parse_value<std::uint64_t>(key, value);
    } else if (key == "grid-points") {
      c.grid_points = parse_value<int>(key, value);
    } else if (key == "input") {
      c.input = value;
    } else if (key == "output") {
      c.output = value;
    } else if (key == "format") {
      try {
        c.format = parse_format(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--format: ") + e.what());
      }
    } else if (key == "parallel") {
      c.parallel = parse_value<unsigned>(key, value);
    } else if (key == "columns") {
      const auto names = split_list(value);
      if (names.size() != 4) {
        throw ConfigError("--columns: expected caption,one_star,two_star,three_star");
      }
      c.columns = {std::string(names[0]), std::string(names[1]), std::string(names[2]),
                   std::string(names[3])};
    } else if (key == "star-map") {
      const auto values = parse_list<double>(key, value);
      if (values.size() != 3) throw ConfigError("--star-map: expected three values");
      std::copy(values.begin(), values.end(), c.star_map.begin());
    }
  }
  validate(c);
  return c;
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_means(const std::vector<double>& mus) {
  require(mus.size() >= 2, "--mus: need at least 2 means");
  for (double m : mus) require(m >= 0.0 && m <= 1.0, "--mus: means must lie in [0, 1]");
  for (std::size_t i = 1; i < mus.size(); ++i) {
    require(mus[i] <= mus[i - 1], "--mus: means must be listed in descending order");
  }
  require(mus[0] > mus[1], "--mus: the first mean must be strictly the largest");
}

void validate_family(const RunConfig& c) {
  require(c.n.size() == 1, "--n: exactly one value required");
  require(c.alpha.size() == 1, "--alpha: exactly one value required");
  require(c.n[0] >= 2, "--n: must be >= 2");
  require(c.alpha[0] > 0.0 && std::isfinite(c.alpha[0]), "--alpha: must be positive");
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.delta > 0.0 && c.delta < 1.0, "--delta: must lie in (0, 1)");
  require(is_power_of_two(c.bound_n), "--bound-n: must be a power of two");
  require(c.reps >= 1, "--reps: must be >= 1");
  require(c.parallel >= 1, "--parallel: must be >= 1");
  require(c.grid_points >= 3, "--grid-points: must be >= 3");
  require(!c.snapshot_every || *c.snapshot_every >= 1, "--snapshot-every: must be >= 1");
  for (double v : c.star_map) require(v >= 0.0 && v <= 1.0, "--star-map: values must lie in [0, 1]");
  if (c.command != Command::table1) require(!c.schemes.empty(), "--scheme: no scheme given");

  switch (c.command) {
    case Command::simulate:
      validate_family(c);
      require(c.k >= 1 && c.k <= static_cast<std::size_t>(c.n[0]), "--k: must lie in [1, n]");
      require(!c.budget || *c.budget >= static_cast<std::uint64_t>(c.n[0]), "--budget: must be >= n");
      break;
    case Command::replay:
      require(!c.input.empty(), "--input: a contest file is required");
      require(c.k >= 1, "--k: must be >= 1");
      break;
    case Command::identify: {
      const int sources = (!c.mus.empty()) + (!c.input.empty()) + (!c.n.empty() || !c.alpha.empty());
      require(sources == 1, "identify needs exactly one of --mus, --n/--alpha or --input");
      if (!c.mus.empty()) validate_means(c.mus);
      if (!c.n.empty() || !c.alpha.empty()) validate_family(c);
      break;
    }
    case Command::table1:
      require(!c.n.empty(), "--n: at least one value required");
      require(!c.alpha.empty(), "--alpha: at least one value required");
      for (int n : c.n) require(n >= 2, "--n: values must be >= 2");
      for (double a : c.alpha) require(a > 0.0 && std::isfinite(a), "--alpha: values must be positive");
      break;
    case Command::coverage:
      require(!c.mus.empty(), "--mus: at least one mean required");
      for (double m : c.mus) require(m >= 0.0 && m <= 1.0, "--mus: means must lie in [0, 1]");
      require(c.budget && *c.budget >= 1, "--budget: must be >= 1");
      break;
  }
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n_threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

nlohmann::ordered_json base_metadata(const RunConfig& c) {
  nlohmann::ordered_json meta;
  meta["command"] = command_name(c.command);
  return meta;
}

std::string tag_of(SchemeKind kind) { return std::string(scheme_name(kind)); }

// Shared by simulate and replay: membership curves of ucb_race over reps.
std::vector<NamedOutput> membership_curves(const RunConfig& c, const Environment& env,
                                           const nlohmann::ordered_json& env_meta) {
  const std::uint64_t n = env.size();
  if (c.k > n) throw ConfigError("--k: must not exceed the number of arms (" + std::to_string(n) + ")");
  const std::uint64_t budget = c.budget.value_or(200 * n);
  if (budget < n) throw ConfigError("--budget: must be >= the number of arms");
  const std::uint64_t every = c.snapshot_every.value_or(2 * n);

  std::vector<NamedOutput> outputs;
  for (SchemeKind kind : c.schemes) {
    const BoundScheme scheme(kind, c.bound_n, c.delta);
    std::vector<std::vector<Snapshot>> per_rep(c.reps);
    parallel_for(c.reps, c.parallel, [&](std::uint64_t r) {
      const std::uint64_t s = derive_seed(c.seed, r);
      Environment local = env.with_seed(s);
      Rng rng(splitmix64(s));
      per_rep[r] = ucb_race(local, scheme, budget, every, c.k, rng).snapshots;
    });

    NamedOutput out{tag_of(kind), {}};
    auto& meta = out.table.metadata;
    meta = base_metadata(c);
    meta["scheme"] = scheme_name(kind);
    meta["N"] = c.bound_n;
    meta["delta"] = c.delta;
    for (const auto& [key, value] : env_meta.items()) meta[key] = value;
    meta["repetitions"] = c.reps;
    meta["seed"] = c.seed;
    meta["k"] = c.k;
    meta["budget"] = budget;
    meta["snapshot_every"] = every;
    out.table.columns = {"samples", "membership_probability"};
    const std::size_t points = per_rep.front().size();
    for (std::size_t j = 0; j < points; ++j) {
      std::uint64_t hits = 0;
      for (const auto& snaps : per_rep) hits += snaps[j].best_in_top_k ? 1 : 0;
      out.table.rows.push_back({static_cast<double>(per_rep.front()[j].total_samples),
                                static_cast<double>(hits) / static_cast<double>(c.reps)});
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

Environment contest_environment(const RunConfig& c, nlohmann::ordered_json& meta) {
  const ParsedContest parsed = parse_contest_csv(c.input, c.columns);
  Environment env = from_contest(parsed.dataset, c.star_map);
  meta["contest_id"] = parsed.dataset.contest_id;
  meta["captions"] = parsed.dataset.captions.size();
  meta["dropped_rows"] = parsed.dropped_rows;
  meta["top_mean"] = env.true_means().front().value();
  return env;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<NamedOutput> cmd_simulate(const RunConfig& c) {
  validate(c);
  const auto means = parametric_means(c.n[0], c.alpha[0]);
  nlohmann::ordered_json meta;
  meta["n"] = c.n[0];
  meta["alpha"] = c.alpha[0];
  return membership_curves(c, bernoulli_environment(means), meta);
}

std::vector<NamedOutput> cmd_replay(const RunConfig& c) {
  validate(c);
  nlohmann::ordered_json meta;
  const Environment env = contest_environment(c, meta);
  return membership_curves(c, env, meta);
}

std::vector<NamedOutput> cmd_identify(const RunConfig& c) {
  validate(c);
  nlohmann::ordered_json env_meta;
  std::optional<Environment> env;
  if (!c.input.empty()) {
    env = contest_environment(c, env_meta);
  } else if (!c.mus.empty()) {
    std::vector<Prob> means;
    for (double m : c.mus) means.emplace_back(m);
    env = bernoulli_environment(means);
    env_meta["mus"] = c.mus;
  } else {
    env = bernoulli_environment(parametric_means(c.n[0], c.alpha[0]));
    env_meta["n"] = c.n[0];
    env_meta["alpha"] = c.alpha[0];
  }
  const std::size_t n = env->size();
  const ComplexityBound bound = predicted_complexity(env->true_means(), c.delta, c.grid_points,
                                                     BoundScheme(SchemeKind::kl_prime, c.bound_n, c.delta));

  std::vector<NamedOutput> outputs;
  for (SchemeKind kind : c.schemes) {
    const BoundScheme scheme(kind, c.bound_n, c.delta);
    std::vector<RunRecord> runs(c.reps);
    parallel_for(c.reps, c.parallel, [&](std::uint64_t r) {
      const std::uint64_t s = derive_seed(c.seed, r);
      Environment local = env->with_seed(s);
      Rng rng(splitmix64(s));
      runs[r] = lil_klucb(local, scheme, c.budget, rng);
    });

    std::uint64_t errors = 0;
    std::uint64_t stopped = 0;
    std::vector<double> totals;
    for (const auto& run : runs) {
      errors += run.recommended != 0 ? 1 : 0;
      stopped += run.stopped ? 1 : 0;
      totals.push_back(static_cast<double>(run.total_samples));
    }
    const double reps = static_cast<double>(c.reps);
    const double mean_total = std::accumulate(totals.begin(), totals.end(), 0.0) / reps;

    NamedOutput out{tag_of(kind), {}};
    auto& meta = out.table.metadata;
    meta = base_metadata(c);
    meta["scheme"] = scheme_name(kind);
    meta["N"] = c.bound_n;
    meta["delta"] = c.delta;
    for (const auto& [key, value] : env_meta.items()) meta[key] = value;
    meta["repetitions"] = c.reps;
    meta["seed"] = c.seed;
    if (c.budget) meta["budget"] = *c.budget;
    meta["error_rate"] = static_cast<double>(errors) / reps;
    meta["stopped_fraction"] = static_cast<double>(stopped) / reps;
    meta["mean_total_samples"] = mean_total;
    meta["median_total_samples"] = median(totals);
    meta["predicted_total"] = bound.total;
    meta["predicted_best_arm_term"] = bound.best_arm_term;
    meta["predicted_note"] = "bound up to a universal constant";
    meta["predicted_witness_mu"] = bound.witness_mus.front();
    meta["sample_to_bound_ratio"] = mean_total / bound.total;

    out.table.columns = {"arm", "true_mean", "mean_pulls", "median_pulls", "min_pulls", "max_pulls",
                         "predicted_term", "predicted_stopping_index"};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> pulls;
      pulls.reserve(runs.size());
      for (const auto& run : runs) pulls.push_back(static_cast<double>(run.per_arm_pulls[i]));
      const auto [lo, hi] = std::minmax_element(pulls.begin(), pulls.end());
      const double term = i == 0 ? bound.best_arm_term : bound.per_arm_terms[i - 1];
      const auto index = i == 0 ? bound.best_arm_stopping_index : bound.stopping_indices[i - 1];
      out.table.rows.push_back({static_cast<double>(i), env->true_means()[i].value(),
                                std::accumulate(pulls.begin(), pulls.end(), 0.0) / reps, median(pulls),
                                *lo, *hi, term, static_cast<double>(index)});
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

HardnessSums hardness_sums(int n, double alpha) {
  const auto gaps = gap_family(n, alpha);
  HardnessSums s;
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double mu = std::max(0.0, 1.0 - gaps[i]);
    s.s_kl += 1.0 / chernoff_information(Prob(mu), Prob(1.0)).value();
    s.s_sg += 1.0 / (gaps[i] * gaps[i]);
  }
  return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope fit needs at least 2 paired points");
  }
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("slope fit needs positive values");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope fit needs at least 2 distinct x values");
  return (m * sxy - sx * sy) / denom;
}

std::vector<NamedOutput> cmd_table1(const RunConfig& c) {
  validate(c);
  std::vector<int> ns = c.n;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  NamedOutput out{"", {}};
  auto& meta = out.table.metadata;
  meta = base_metadata(c);
  meta["n"] = ns;
  meta["alpha"] = c.alpha;
  out.table.columns = {"n", "alpha", "s_kl", "s_sg", "s_kl_over_n_log_n"};

  std::map<double, std::vector<HardnessSums>> by_alpha;
  for (int n : ns) {
    for (double a : c.alpha) {
      const HardnessSums s = hardness_sums(n, a);
      by_alpha[a].push_back(s);
      const double nd = n;
      out.table.rows.push_back({nd, a, s.s_kl, s.s_sg, s.s_kl / (nd * std::log(nd))});
    }
  }

  if (ns.size() >= 4) {
    std::vector<double> xs(ns.begin(), ns.end());
    auto slopes = nlohmann::ordered_json::array();
    for (double a : c.alpha) {
      const auto& sums = by_alpha[a];
      std::vector<double> kl, sg, kl_over_log, ratio;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        kl.push_back(sums[i].s_kl);
        sg.push_back(sums[i].s_sg);
        kl_over_log.push_back(sums[i].s_kl / std::log(xs[i]));
        ratio.push_back(sums[i].s_kl / (xs[i] * std::log(xs[i])));
      }
      const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
      nlohmann::ordered_json entry;
      entry["alpha"] = a;
      entry["kl_slope"] = loglog_slope(xs, kl);
      entry["sg_slope"] = loglog_slope(xs, sg);
      entry["kl_over_log_n_slope"] = loglog_slope(xs, kl_over_log);
      entry["kl_n_log_n_ratio_spread"] = *hi / *lo;
      slopes.push_back(entry);
    }
    meta["slopes"] = slopes;
  } else {
    meta["slopes"] = "fit needs at least 4 distinct n values";
  }
  return {out};
}

std::vector<NamedOutput> cmd_coverage(const RunConfig& c) {
  validate(c);
  const std::uint64_t t_max = *c.budget;
  std::vector<double> mus = c.mus;
  std::sort(mus.begin(), mus.end());

  std::vector<NamedOutput> outputs;
  for (SchemeKind kind : c.schemes) {
    const BoundScheme scheme(kind, c.bound_n, c.delta);
    const bool kl_kind = kind == SchemeKind::kl_tilted || kind == SchemeKind::kl_prime;
    std::vector<double> bound(t_max + 1);
    for (std::uint64_t t = 1; t <= t_max; ++t) {
      bound[t] = kl_kind ? scheme.threshold(t).value() : scheme.radius(t);
    }
    // Whether mu is strictly outside the one-sided bound built from p.
    auto outside = [&](double p, double mu) {
      switch (kind) {
        case SchemeKind::kl_tilted: return detail::tilted_kl(p, mu, c.bound_n);
        case SchemeKind::kl_prime: return detail::kl(p, mu);
        default: return std::abs(mu - p);
      }
    };

    NamedOutput out{tag_of(kind), {}};
    auto& meta = out.table.metadata;
    meta = base_metadata(c);
    meta["scheme"] = scheme_name(kind);
    meta["N"] = c.bound_n;
    meta["delta"] = c.delta;
    meta["trajectories"] = c.reps;
    meta["t_max"] = t_max;
    meta["seed"] = c.seed;
    out.table.columns = {"mu", "upper_violation_rate", "lower_violation_rate", "joint_violation_rate"};

    for (double mu : mus) {
      // 1 = upper side failed, 2 = lower side failed.
      std::vector<unsigned char> failed(c.reps, 0);
      parallel_for(c.reps, c.parallel, [&](std::uint64_t r) {
        Rng rng(derive_seed(c.seed, r));
        std::uint64_t successes = 0;
        unsigned char flags = 0;
        for (std::uint64_t t = 1; t <= t_max && flags != 3; ++t) {
          successes += rng.bernoulli(mu) ? 1 : 0;
          const double p = static_cast<double>(successes) / static_cast<double>(t);
          if (p < mu && !(flags & 1) && outside(p, mu) > bound[t]) flags |= 1;
          if (p > mu && !(flags & 2) && outside(p, mu) > bound[t]) flags |= 2;
        }
        failed[r] = flags;
      });
      std::uint64_t upper = 0, lower = 0, joint = 0;
      for (auto f : failed) {
        upper += (f & 1) ? 1 : 0;
        lower += (f & 2) ? 1 : 0;
        joint += f ? 1 : 0;
      }
      const double reps = static_cast<double>(c.reps);
      out.table.rows.push_back({mu, upper / reps, lower / reps, joint / reps});
    }
    outputs.push_back(std::move(out));
  }
  return outputs;
}

std::vector<NamedOutput> run_command(const RunConfig& c) {
  switch (c.command) {
    case Command::simulate: return cmd_simulate(c);
    case Command::replay: return cmd_replay(c);
    case Command::identify: return cmd_identify(c);
    case Command::table1: return cmd_table1(c);
    case Command::coverage: return cmd_coverage(c);
  }
  throw std::logic_error("unknown command");
}

}  // namespace lilklucb
