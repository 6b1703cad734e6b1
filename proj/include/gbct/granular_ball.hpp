#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"
#include "gbct/kmeans.hpp"

namespace gbct {

/// A group of points summarised by its centroid and radii.
///
/// Densities are carried as natural logarithms: |GB| / r^d overflows or
/// underflows a double long before d reaches a few hundred. A ball whose
/// points all coincide (in particular a single-point ball) has radius 0,
/// densities +inf and consistency 1.
struct GranularBall {
  std::vector<std::size_t> members;  // sorted ascending
  std::vector<double> center;
  double max_radius = 0.0;
  double avg_radius = 0.0;
  double log_max_density = std::numeric_limits<double>::infinity();
  double log_avg_density = std::numeric_limits<double>::infinity();
  double consistency = 1.0;

  std::size_t size() const { return members.size(); }
  bool degenerate() const { return max_radius == 0.0; }
  double max_density() const { return std::exp(log_max_density); }
  double avg_density() const { return std::exp(log_avg_density); }
};

/// Computes center, radii, the two densities and the center-consistency of
/// the ball formed by `members`.
inline GranularBall fit_stats(const Dataset& ds, std::vector<std::size_t> members) {
  if (members.empty()) throw InvalidArgument("granular ball needs at least one member");
  std::sort(members.begin(), members.end());
  const std::size_t d = ds.dim();
  const std::size_t count = members.size();

  GranularBall ball;
  ball.center.assign(d, 0.0);
  for (std::size_t idx : members) {
    if (idx >= ds.size()) throw InvalidArgument("member index out of range");
    const auto p = ds.point(idx);
    for (std::size_t k = 0; k < d; ++k) ball.center[k] += p[k];
  }
  for (double& v : ball.center) v /= static_cast<double>(count);

  std::vector<double> dist(count);
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    dist[i] = distance(ds.point(members[i]), ball.center);
    ball.max_radius = std::max(ball.max_radius, dist[i]);
    sum += dist[i];
  }
  ball.avg_radius = sum / static_cast<double>(count);
  // The mean cannot exceed the maximum, but rounding can push it a hair over.
  ball.avg_radius = std::min(ball.avg_radius, ball.max_radius);
  ball.members = std::move(members);

  if (ball.max_radius == 0.0) return ball;

  const double dd = static_cast<double>(d);
  const auto inner = static_cast<double>(
      std::count_if(dist.begin(), dist.end(), [&](double x) { return x <= ball.avg_radius; }));
  ball.log_max_density = std::log(static_cast<double>(count)) - dd * std::log(ball.max_radius);
  ball.log_avg_density = std::log(inner) - dd * std::log(ball.avg_radius);
  ball.consistency = std::exp(-std::abs(ball.log_max_density - ball.log_avg_density));
  return ball;
}

/// min(avg density, max density) / max(avg density, max density); 1 for
/// degenerate balls.
inline double consistency(const GranularBall& ball) { return ball.consistency; }

/// Balls covering a dataset of `point_count` points.
struct BallSet {
  std::vector<GranularBall> balls;
  std::size_t point_count = 0;

  std::size_t size() const { return balls.size(); }
  const GranularBall& operator[](std::size_t i) const { return balls[i]; }
};

/// True when every point index in [0, point_count) belongs to exactly one ball.
inline bool is_partition(const BallSet& set) {
  std::vector<char> seen(set.point_count, 0);
  std::size_t total = 0;
  for (const auto& b : set.balls) {
    if (b.members.empty()) return false;
    for (std::size_t idx : b.members) {
      if (idx >= set.point_count || seen[idx]) return false;
      seen[idx] = 1;
      ++total;
    }
  }
  return total == set.point_count;
}

/// Rule deciding whether a tentative binary split of a low-consistency ball
/// is kept. Every rule also requires both children to hold >= 2 points.
enum class SplitAcceptance {
  both_children_denser,   // both children's max-radius density exceeds the parent's
  either_child_denser,    // at least one child is denser than the parent
  children_consistent,    // both children reach the consistency threshold
};

inline SplitAcceptance parse_split_acceptance(std::string_view name) {
  if (name == "both") return SplitAcceptance::both_children_denser;
  if (name == "either") return SplitAcceptance::either_child_denser;
  if (name == "consistent") return SplitAcceptance::children_consistent;
  throw InvalidArgument("unknown split policy '" + std::string(name) +
                        "' (expected both|either|consistent)");
}

struct SplitConfig {
  double consistency_threshold = 0.70;
  // Number of coarse k-means balls; floor(sqrt(n)) when unset.
  std::optional<std::size_t> coarse_count;
  SplitAcceptance split_acceptance = SplitAcceptance::children_consistent;
  std::size_t kmeans_max_iters = 100;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(consistency_threshold > 0.0 && consistency_threshold < 1.0))
      throw InvalidArgument("consistency threshold must lie in (0, 1)");
    if (coarse_count && *coarse_count == 0)
      throw InvalidArgument("coarse ball count must be >= 1");
  }

  std::size_t coarse_k(std::size_t n) const {
    if (coarse_count) return *coarse_count;
    auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (k * k > n) --k;
    while ((k + 1) * (k + 1) <= n) ++k;
    return std::max<std::size_t>(k, 1);
  }
};

/// Initial cover: k-means with k = floor(sqrt(n)) (or the configured count).
inline BallSet coarse_divide(const Dataset& ds, const SplitConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  BallSet out;
  out.point_count = ds.size();
  for (auto& group :
       kmeans_partition(ds, all, cfg.coarse_k(ds.size()), cfg.kmeans_max_iters, cfg.seed)) {
    out.balls.push_back(fit_stats(ds, std::move(group)));
  }
  return out;
}

/// Seeded 2-means split of a ball into two non-empty children.
inline std::pair<GranularBall, GranularBall> binary_split(const Dataset& ds,
                                                          const GranularBall& ball,
                                                          const SplitConfig& cfg) {
  if (ball.size() < 2) throw InvalidArgument("cannot split a ball with fewer than 2 members");
  auto groups = kmeans_partition(ds, ball.members, 2, cfg.kmeans_max_iters,
                                 mix_seed(cfg.seed, ball.members.front()));
  if (groups.size() < 2) {
    // All members coincide; any split is as good as another.
    std::vector<std::size_t> rest = ball.members;
    const std::size_t last = rest.back();
    rest.pop_back();
    return {fit_stats(ds, std::move(rest)), fit_stats(ds, {last})};
  }
  return {fit_stats(ds, std::move(groups[0])), fit_stats(ds, std::move(groups[1]))};
}

/// Whether `cfg` keeps the split of `parent` into `a` and `b`.
inline bool accept_split(const GranularBall& parent, const GranularBall& a,
                         const GranularBall& b, const SplitConfig& cfg) {
  if (a.size() < 2 || b.size() < 2) return false;
  switch (cfg.split_acceptance) {
    case SplitAcceptance::both_children_denser:
      return a.log_max_density > parent.log_max_density &&
             b.log_max_density > parent.log_max_density;
    case SplitAcceptance::either_child_denser:
      return a.log_max_density > parent.log_max_density ||
             b.log_max_density > parent.log_max_density;
    case SplitAcceptance::children_consistent:
      return a.consistency >= cfg.consistency_threshold &&
             b.consistency >= cfg.consistency_threshold;
  }
  return false;
}

/// Fine division: sweeps the balls, splitting every ball whose consistency is
/// below the threshold as long as the acceptance rule keeps the split.
///
/// A ball whose split is rejected is final and is not tried again. Children
/// take the parent's slot in the sequence, so the output order is determined
/// by the input order. The loop ends after a sweep that accepts nothing.
inline BallSet split_all(const Dataset& ds, BallSet balls, const SplitConfig& cfg) {
  cfg.validate();
  std::vector<char> settled(balls.size(), 0);
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<GranularBall> next;
    std::vector<char> next_settled;
    next.reserve(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) {
      GranularBall& ball = balls.balls[i];
      if (settled[i] || ball.size() < 2 || ball.consistency >= cfg.consistency_threshold) {
        next.push_back(std::move(ball));
        next_settled.push_back(1);
        continue;
      }
      auto [a, b] = binary_split(ds, ball, cfg);
      if (accept_split(ball, a, b, cfg)) {
        next.push_back(std::move(a));
        next.push_back(std::move(b));
        next_settled.push_back(0);
        next_settled.push_back(0);
        grew = true;
      } else {
        next.push_back(std::move(ball));
        next_settled.push_back(1);
      }
    }
    balls.balls = std::move(next);
    settled = std::move(next_settled);
  }
  return balls;
}

/// Coarse division followed by fine division.
inline BallSet generate_balls(const Dataset& ds, const SplitConfig& cfg) {
  return split_all(ds, coarse_divide(ds, cfg), cfg);
}

}  // namespace gbct
