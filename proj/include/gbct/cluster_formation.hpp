#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"
#include "gbct/granular_ball.hpp"
#include "gbct/union_find.hpp"

namespace gbct {

/// Pairwise boundary distances between balls.
///
/// raw(i, j) = |c_i - c_j| - (r_i + r_j) is negative for overlapping balls.
/// When any raw distance is negative every off-diagonal entry is shifted by
/// delta = 2 * |most negative raw distance|, which makes all shifted entries
/// strictly positive; otherwise delta = 0. Similarity is the reciprocal of the
/// shifted distance, 0 on the diagonal.
class BallGraph {
 public:
  BallGraph() = default;

  explicit BallGraph(const BallSet& balls) : m_(balls.size()) {
    if (m_ < 2) throw InvalidArgument("ball graph needs at least 2 balls");
    raw_.assign(m_ * m_, 0.0);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& a = balls[i];
      for (std::size_t j = i + 1; j < m_; ++j) {
        const auto& b = balls[j];
        const double v = distance(a.center, b.center) - (a.max_radius + b.max_radius);
        raw_[i * m_ + j] = v;
        raw_[j * m_ + i] = v;
        lowest = std::min(lowest, v);
      }
    }
    delta_ = lowest < 0.0 ? 2.0 * -lowest : 0.0;
  }

  std::size_t size() const { return m_; }
  double delta() const { return delta_; }
  double raw(std::size_t i, std::size_t j) const { return raw_[i * m_ + j]; }
  double shifted(std::size_t i, std::size_t j) const {
    return i == j ? 0.0 : raw_[i * m_ + j] + delta_;
  }
  double sim(std::size_t i, std::size_t j) const { return i == j ? 0.0 : 1.0 / shifted(i, j); }

 private:
  std::size_t m_ = 0;
  double delta_ = 0.0;
  std::vector<double> raw_;
};

inline BallGraph build_graph(const BallSet& balls) { return BallGraph(balls); }

/// Indices of noise balls: single-point balls, plus balls whose max-radius
/// density is below `noise_factor` times the mean density of the balls with
/// at least two points. Balls of coincident points (infinite density) are
/// never noise and do not enter the mean.
inline std::vector<std::size_t> detect_noise_balls(const BallSet& balls,
                                                   double noise_factor = 0.2) {
  if (balls.size() == 0) throw InvalidArgument("no balls to inspect");
  if (!(noise_factor >= 0.0)) throw InvalidArgument("noise factor must be non-negative");

  // log of the mean density, via log-sum-exp.
  double peak = -std::numeric_limits<double>::infinity();
  std::size_t counted = 0;
  for (const auto& b : balls.balls) {
    if (b.size() >= 2 && std::isfinite(b.log_max_density)) {
      peak = std::max(peak, b.log_max_density);
      ++counted;
    }
  }
  double log_mean = -std::numeric_limits<double>::infinity();
  if (counted > 0) {
    double acc = 0.0;
    for (const auto& b : balls.balls) {
      if (b.size() >= 2 && std::isfinite(b.log_max_density))
        acc += std::exp(b.log_max_density - peak);
    }
    log_mean = peak + std::log(acc) - std::log(static_cast<double>(counted));
  }
  const double cut = std::log(noise_factor) + log_mean;

  std::vector<std::size_t> noise;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto& b = balls[i];
    if (b.size() < 2 || b.log_max_density < cut) noise.push_back(i);
  }
  if (noise.size() == balls.size())
    throw DegenerateInput("every granular ball is noise; nothing to cluster");
  return noise;
}

/// Similarity of two clusters: that of their most similar ball pair.
inline double cluster_similarity(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                 const BallGraph& graph) {
  double best = 0.0;
  for (std::size_t p : a)
    for (std::size_t q : b) best = std::max(best, graph.sim(p, q));
  return best;
}

/// One round of the merge schedule.
struct MergeRound {
  std::size_t round_index = 0;
  // Clusters joined this round, each named by its smallest ball index at the
  // start of the round.
  std::vector<std::pair<std::size_t, std::size_t>> merges;
  double min_merge_distance = 0.0;
  std::size_t clusters_after = 0;
};

struct Clustering {
  std::vector<int> ball_labels;
  std::vector<int> point_labels;
  std::size_t k = 0;
  std::vector<MergeRound> trace;
  std::vector<std::size_t> noise_balls;
  // Adaptive mode only: false when no jump in merge distance qualified.
  bool knee_detected = true;
};

namespace merge_detail {

struct Link {
  double dist;
  std::size_t lo;  // smaller ball index of the realising pair
  std::size_t hi;

  bool operator<(const Link& o) const { return std::tie(dist, lo, hi) < std::tie(o.dist, o.lo, o.hi); }
};

class Schedule {
 public:
  Schedule(const BallGraph& graph, std::vector<std::size_t> active)
      : graph_(graph), active_(std::move(active)), uf_(graph.size()), clusters_(active_.size()) {}

  std::size_t clusters() const { return clusters_; }
  const std::vector<MergeRound>& trace() const { return trace_; }

  std::vector<std::size_t> roots() {
    std::vector<std::size_t> r(graph_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = uf_.find(i);
    return r;
  }

  /// Runs one round. `full` merges along every cluster's best link; otherwise
  /// only the M - target closest distinct links are applied, one at a time in
  /// increasing distance, stopping once `target` clusters remain.
  void round(bool full, std::size_t target) {
    const std::size_t m = graph_.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> root(m);
    std::vector<std::size_t> label(m, m);  // smallest ball index per root
    for (std::size_t p : active_) {
      root[p] = uf_.find(p);
      label[root[p]] = std::min(label[root[p]], p);
    }

    // Each cluster's nearest ball pair leading outside it.
    std::vector<Link> best(m, Link{inf, m, m});
    for (std::size_t x = 0; x < active_.size(); ++x) {
      const std::size_t p = active_[x];
      for (std::size_t y = x + 1; y < active_.size(); ++y) {
        const std::size_t q = active_[y];
        if (root[p] == root[q]) continue;
        const Link l{graph_.shifted(p, q), p, q};
        if (l < best[root[p]]) best[root[p]] = l;
        if (l < best[root[q]]) best[root[q]] = l;
      }
    }
    // One link per cluster: a mutual nearest pair appears twice and counts
    // twice towards the M - target budget.
    std::vector<Link> links;
    for (std::size_t p : active_) {
      if (root[p] == p && best[p].lo != m) links.push_back(best[p]);
    }
    std::sort(links.begin(), links.end());
    if (!full && clusters_ > target) links.resize(std::min(links.size(), clusters_ - target));

    MergeRound rec;
    rec.round_index = trace_.size() + 1;
    rec.min_merge_distance = inf;
    for (const Link& l : links) {
      if (!full && clusters_ <= target) break;
      if (!uf_.unite(l.lo, l.hi)) continue;
      --clusters_;
      rec.merges.emplace_back(label[root[l.lo]], label[root[l.hi]]);
      rec.min_merge_distance = std::min(rec.min_merge_distance, l.dist);
    }
    rec.clusters_after = clusters_;
    if (!rec.merges.empty()) trace_.push_back(std::move(rec));
  }

 private:
  const BallGraph& graph_;
  std::vector<std::size_t> active_;
  UnionFind uf_;
  std::size_t clusters_;
  std::vector<MergeRound> trace_;
};

inline std::vector<std::size_t> complement(std::size_t m, const std::vector<std::size_t>& noise) {
  std::vector<char> is_noise(m, 0);
  for (std::size_t i : noise) is_noise.at(i) = 1;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < m; ++i)
    if (!is_noise[i]) active.push_back(i);
  return active;
}

// Assigns noise balls to the cluster of their nearest non-noise ball and
// numbers clusters 0..K-1 by first appearance in point order.
inline void finalize(Clustering& out, const BallSet& balls, const BallGraph& graph,
                     std::vector<std::size_t> root, const std::vector<std::size_t>& active) {
  const std::size_t m = balls.size();
  for (std::size_t nb : out.noise_balls) {
    std::size_t nearest = active.front();
    for (std::size_t p : active) {
      if (graph.shifted(nb, p) < graph.shifted(nb, nearest)) nearest = p;
    }
    root[nb] = root[nearest];
  }

  std::vector<std::size_t> owner(balls.point_count, m);
  for (std::size_t b = 0; b < m; ++b)
    for (std::size_t idx : balls[b].members) owner[idx] = b;

  std::vector<int> id(m, -1);
  int next = 0;
  out.point_labels.assign(balls.point_count, -1);
  for (std::size_t i = 0; i < balls.point_count; ++i) {
    const std::size_t r = root[owner[i]];
    if (id[r] < 0) id[r] = next++;
    out.point_labels[i] = id[r];
  }
  out.ball_labels.resize(m);
  for (std::size_t b = 0; b < m; ++b) out.ball_labels[b] = id[root[b]];
  out.k = static_cast<std::size_t>(next);
}

}  // namespace merge_detail

struct MergeConfig {
  // Leading rounds in which every cluster merges with its nearest cluster.
  // Round 1 always runs in full; later rounds keep only the M - K closest links.
  std::size_t full_rounds = 1;
  double noise_factor = 0.2;
  double jump_factor = 2.0;

  void validate() const {
    if (full_rounds == 0) throw InvalidArgument("at least one full merge round is required");
    if (!(noise_factor >= 0.0)) throw InvalidArgument("noise factor must be non-negative");
    if (!(jump_factor > 1.0)) throw InvalidArgument("jump factor must be > 1");
  }
};

/// Merges balls into exactly K clusters.
///
/// Round 1 joins every non-noise ball with its nearest ball. Each later round
/// takes every cluster's nearest-cluster link (distance between clusters is
/// that of their nearest balls), keeps the M - K closest and applies them in
/// increasing distance until K clusters remain. With cfg.full_rounds > 1 the
/// rounds up to that index merge along every link instead. Throws
/// DegenerateInput when a full round leaves fewer than K clusters.
inline Clustering merge_to_k(const BallSet& balls, const BallGraph& graph, std::size_t k,
                             std::vector<std::size_t> noise, const MergeConfig& cfg = {}) {
  cfg.validate();
  if (k == 0) throw InvalidArgument("K must be >= 1");
  if (graph.size() != balls.size()) throw InvalidArgument("graph does not match ball set");
  auto active = merge_detail::complement(balls.size(), noise);
  if (active.size() < k)
    throw DegenerateInput("K=" + std::to_string(k) + " exceeds the " +
                          std::to_string(active.size()) + " non-noise balls");

  merge_detail::Schedule schedule(graph, active);
  for (std::size_t r = 1; schedule.clusters() > 1 && (r == 1 || schedule.clusters() > k); ++r) {
    const bool full = r <= cfg.full_rounds;
    schedule.round(full, k);
    if (full && schedule.clusters() < k)
      throw DegenerateInput("K=" + std::to_string(k) + " unreachable after mandatory rounds (" +
                            std::to_string(schedule.clusters()) + " clusters remain)");
  }

  Clustering out;
  out.trace = schedule.trace();
  out.noise_balls = std::move(noise);
  merge_detail::finalize(out, balls, graph, schedule.roots(), active);
  return out;
}

inline Clustering merge_to_k(const BallSet& balls, const BallGraph& graph, std::size_t k,
                             const MergeConfig& cfg = {}) {
  return merge_to_k(balls, graph, k, detect_noise_balls(balls, cfg.noise_factor), cfg);
}

/// Chooses K from the merge trace.
///
/// The full rounds run as in merge_to_k; afterwards every round applies the
/// single closest cluster link, down to one cluster. The cut is placed before
/// the round whose minimum merge distance jumps the most relative to the
/// previous round, provided the jump is at least cfg.jump_factor. Without
/// such a jump the single-cluster result is returned with
/// knee_detected = false.
inline Clustering adaptive_merge(const BallSet& balls, const BallGraph& graph,
                                 std::vector<std::size_t> noise, const MergeConfig& cfg = {}) {
  cfg.validate();
  if (graph.size() != balls.size()) throw InvalidArgument("graph does not match ball set");
  auto active = merge_detail::complement(balls.size(), noise);
  if (active.size() < 2) throw DegenerateInput("adaptive merging needs >= 2 non-noise balls");

  merge_detail::Schedule schedule(graph, active);
  std::vector<std::vector<std::size_t>> snapshots{schedule.roots()};
  for (std::size_t r = 1; schedule.clusters() > 1; ++r) {
    schedule.round(r <= cfg.full_rounds, schedule.clusters() - 1);
    snapshots.push_back(schedule.roots());
  }
  const auto& trace = schedule.trace();

  std::size_t cut = trace.size();  // rounds applied before the cut
  double best_ratio = 0.0;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    const double prev = trace[t - 1].min_merge_distance;
    const double cur = trace[t].min_merge_distance;
    double ratio = 1.0;
    if (prev > 0.0)
      ratio = cur / prev;
    else if (cur > 0.0)
      ratio = std::numeric_limits<double>::infinity();
    if (ratio >= cfg.jump_factor && ratio > best_ratio) {
      best_ratio = ratio;
      cut = t;
    }
  }

  Clustering out;
  out.knee_detected = cut < trace.size();
  out.trace = trace;
  out.noise_balls = std::move(noise);
  merge_detail::finalize(out, balls, graph, snapshots[cut], active);
  return out;
}

inline Clustering adaptive_merge(const BallSet& balls, const BallGraph& graph,
                                 const MergeConfig& cfg = {}) {
  return adaptive_merge(balls, graph, detect_noise_balls(balls, cfg.noise_factor), cfg);
}

/// Point labels of a finalised clustering, numbered 0..K-1 by first appearance.
inline std::vector<int> point_labels(const Clustering& clustering, const BallSet& balls) {
  std::vector<int> out(balls.point_count, -1);
  std::vector<int> id(clustering.k + 1, -1);
  int next = 0;
  std::vector<int> by_point(balls.point_count, -1);
  for (std::size_t b = 0; b < balls.size(); ++b)
    for (std::size_t idx : balls[b].members) by_point[idx] = clustering.ball_labels.at(b);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int c = by_point[i];
    if (c < 0) throw InvalidArgument("clustering is not finalised");
    if (static_cast<std::size_t>(c) >= id.size()) id.resize(c + 1, -1);
    if (id[c] < 0) id[c] = next++;
    out[i] = id[c];
  }
  return out;
}

/// Writes round_index,merges_applied,min_merge_distance per round.
inline void save_trace_csv(const std::string& path, const std::vector<MergeRound>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  out << "round_index,merges_applied,min_merge_distance\n";
  for (const auto& r : trace)
    out << r.round_index << ',' << r.merges.size() << ',' << r.min_merge_distance << '\n';
  if (!out) throw IoError("write error on '" + path + "'");
}

}  // namespace gbct
