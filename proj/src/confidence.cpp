#include "lilklucb/confidence.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lilklucb {

std::string_view scheme_name(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::kl_tilted: return "kl";
    case SchemeKind::kl_prime: return "kl-prime";
    case SchemeKind::sg1: return "sg1";
    case SchemeKind::sg2: return "sg2";
  }
  return "unknown";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "kl") return SchemeKind::kl_tilted;
  if (name == "kl-prime") return SchemeKind::kl_prime;
  if (name == "sg1") return SchemeKind::sg1;
  if (name == "sg2") return SchemeKind::sg2;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected kl, kl-prime, sg1 or sg2)");
}

bool is_power_of_two(int n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

double kappa_series(int n_tilt) {
  if (!is_power_of_two(n_tilt)) {
    throw std::invalid_argument("N must be a power of two, got " + std::to_string(n_tilt));
  }
  const double n = n_tilt;
  const double s = (n + 1.0) / n;
  const int l = std::countr_zero(static_cast<unsigned>(n_tilt));

  double head = 0.0;
  if (l != 0) {
    for (int t = 1; t <= n_tilt; ++t) head += std::pow(std::log2(2.0 * t), -s);
  }

  // Smallest terms first.
  const auto k_max = static_cast<double>(kKappaExplicitTerms);
  double tail = n * std::pow(k_max + 1.0, -1.0 / n);
  for (auto k = kKappaExplicitTerms; k >= static_cast<std::uint64_t>(l); --k) {
    tail += std::pow(static_cast<double>(k) + 1.0, -s);
    if (k == 0) break;
  }
  return head + n * tail;
}

double kappa(int n_tilt, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double n = n_tilt;
  return std::pow(delta, 1.0 / (n + 1.0)) * std::pow(kappa_series(n_tilt), n / (n + 1.0));
}

double c_of_n(int n_tilt) {
  if (n_tilt < 1) throw std::invalid_argument("N must be >= 1");
  const double n = n_tilt;
  return (n + 1.0) / (n - std::log(n + 1.0));
}

Sg2Radius::Sg2Radius(double delta, double beta) : beta_(beta), x_(0.0) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(beta > 1.0)) throw std::invalid_argument("sg2 beta must exceed 1");
  const double e = std::numbers::e;
  double x_min = std::max(8.0 / ((e - 1.0) * (e - 1.0)), beta / (2.0 * (beta - 1.0)));
  x_min *= 1.0 + 1e-12;
  if (failure_probability(x_min, beta) <= delta) {
    x_ = x_min;
    return;
  }
  double x_max = 2.0 * x_min;
  while (failure_probability(x_max, beta) > delta) x_max *= 2.0;
  x_ = detail::bisect_boundary(
      [&](double x) { return failure_probability(x, beta) <= delta; }, x_max, x_min);
}

double Sg2Radius::failure_probability(double x, double beta) {
  const double u = beta * (1.0 - 1.0 / (2.0 * x));
  if (!(u > 1.0)) return std::numeric_limits<double>::infinity();
  const double log_p = 0.5 + std::log(std::riemann_zeta(u)) +
                       beta * std::log(std::sqrt(x) / (2.0 * std::numbers::sqrt2) + 1.0) - x;
  return std::exp(log_p);
}

double Sg2Radius::operator()(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("t must be >= 1");
  const double td = static_cast<double>(t);
  return std::sqrt((x_ + beta_ * std::log1p(std::log(td))) / (2.0 * td));
}

double sg2_radius(std::uint64_t t, double delta) { return Sg2Radius(delta)(t); }

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(delta));
  }
}

}  // namespace

BoundScheme::BoundScheme(SchemeKind kind, int n_tilt, double delta)
    : BoundScheme(kind, n_tilt, delta,
                  kind == SchemeKind::sg2 ? 0.0 : (check_delta(delta), kappa_series(n_tilt))) {}

BoundScheme::BoundScheme(SchemeKind kind, int n_tilt, double delta, double series)
    : kind_(kind), n_tilt_(n_tilt), delta_(delta), series_(series) {
  check_delta(delta);
  if (kind_ == SchemeKind::sg2) {
    Sg2Radius r(delta);
    sg2_x_ = r.exploration();
    sg2_beta_ = r.beta();
    return;
  }
  const double n = n_tilt_;
  kappa_ = std::pow(delta_, 1.0 / (n + 1.0)) * std::pow(series_, n / (n + 1.0));
  if (kind_ == SchemeKind::kl_prime) c_ = c_of_n(n_tilt_);
}

BoundScheme BoundScheme::with_delta(double delta) const {
  return BoundScheme(kind_, n_tilt_, delta, series_);
}

double BoundScheme::log_term(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("t must be >= 1");
  if (kind_ == SchemeKind::sg2) throw std::logic_error("sg2 has no kappa log term");
  const double v = std::log(kappa_ * (1.0 + std::log2(static_cast<double>(t))) / delta_);
  return v > 0.0 ? v : 0.0;
}

Divergence BoundScheme::threshold(std::uint64_t t) const {
  if (kind_ == SchemeKind::sg2) throw std::logic_error("sg2 has no divergence threshold");
  return Divergence(c_ * log_term(t) / static_cast<double>(t));
}

double BoundScheme::radius(std::uint64_t t) const {
  switch (kind_) {
    case SchemeKind::sg1: {
      const double n = n_tilt_;
      const double widen = (n + 1.0) / n;
      return std::sqrt(0.5 * widen * widen * log_term(t) / static_cast<double>(t));
    }
    case SchemeKind::sg2: {
      if (t == 0) throw std::invalid_argument("t must be >= 1");
      const double td = static_cast<double>(t);
      return std::sqrt((sg2_x_ + sg2_beta_ * std::log1p(std::log(td))) / (2.0 * td));
    }
    default:
      throw std::logic_error("radius is defined only for the sub-Gaussian schemes");
  }
}

double deviation_z(const BoundScheme& scheme, Prob mu, std::uint64_t t, Side side) {
  double scale = 1.0;
  switch (scheme.kind()) {
    case SchemeKind::kl_tilted: {
      const double n = scheme.n_tilt();
      scale = n / (n + 1.0);
      break;
    }
    case SchemeKind::kl_prime: break;
    default: throw std::invalid_argument("deviation_z needs a KL scheme");
  }
  const double f = scheme.threshold(t).value();
  const double m = mu.value();
  const double sign = side == Side::upper ? 1.0 : -1.0;
  const double z_max = side == Side::upper ? 1.0 - m : m;
  if (z_max <= 0.0) return 0.0;
  auto g = [&](double z) { return detail::kl(std::clamp(m + sign * scale * z, 0.0, 1.0), m); };
  if (g(z_max) <= f) return z_max;
  return detail::bisect_boundary([&](double z) { return g(z) <= f; }, 0.0, z_max);
}

namespace {

void require_pulls(const ArmStats& stats) {
  if (stats.pulls == 0) throw std::invalid_argument("confidence bound of an arm with no pulls");
}

}  // namespace

Prob upper_bound(const BoundScheme& scheme, const ArmStats& stats) {
  require_pulls(stats);
  const double p = stats.mean();
  switch (scheme.kind()) {
    case SchemeKind::kl_tilted:
      return detail::tilted_upper_inverse(p, scheme.threshold(stats.pulls).value(), scheme.n_tilt())
          .value;
    case SchemeKind::kl_prime:
      return Prob(detail::kl_upper_inverse(p, scheme.threshold(stats.pulls).value()));
    case SchemeKind::sg1:
    case SchemeKind::sg2:
      return Prob(std::min(1.0, p + scheme.radius(stats.pulls)));
  }
  throw std::logic_error("unreachable");
}

Prob lower_bound(const BoundScheme& scheme, const ArmStats& stats) {
  require_pulls(stats);
  const double p = stats.mean();
  switch (scheme.kind()) {
    case SchemeKind::kl_tilted:
      return detail::tilted_lower_inverse(p, scheme.threshold(stats.pulls).value(), scheme.n_tilt())
          .value;
    case SchemeKind::kl_prime:
      return Prob(detail::kl_lower_inverse(p, scheme.threshold(stats.pulls).value()));
    case SchemeKind::sg1:
    case SchemeKind::sg2:
      return Prob(std::max(0.0, p - scheme.radius(stats.pulls)));
  }
  throw std::logic_error("unreachable");
}

bool covers(const BoundScheme& scheme, const ArmStats& stats, double mu, Side side) {
  require_pulls(stats);
  const double p = stats.mean();
  if (side == Side::upper ? mu <= p : mu >= p) return true;
  switch (scheme.kind()) {
    case SchemeKind::kl_tilted:
      return detail::tilted_kl(p, mu, scheme.n_tilt()) <= scheme.threshold(stats.pulls).value();
    case SchemeKind::kl_prime:
      return detail::kl(p, mu) <= scheme.threshold(stats.pulls).value();
    case SchemeKind::sg1:
    case SchemeKind::sg2:
      return std::abs(mu - p) <= scheme.radius(stats.pulls);
  }
  throw std::logic_error("unreachable");
}

}  // namespace lilklucb
