#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "gbct/cluster_formation.hpp"
#include "gbct/dataset.hpp"
#include "gbct/granular_ball.hpp"

namespace gbct {

struct FitOptions {
  SplitConfig split;
  // Target cluster count; adaptive detection when unset.
  std::optional<std::size_t> k;
  MergeConfig merge;
};

struct PhaseTimes {
  double coarse_ms = 0.0;
  double split_ms = 0.0;
  double graph_ms = 0.0;
  double merge_ms = 0.0;
  double total_ms() const { return coarse_ms + split_ms + graph_ms + merge_ms; }
};

struct FitResult {
  BallSet balls;
  Clustering clustering;
  PhaseTimes times;
};

/// Ball generation followed by cluster formation.
inline FitResult fit(const Dataset& ds, const FitOptions& opt) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  FitResult res;
  auto t0 = clock::now();
  BallSet coarse = coarse_divide(ds, opt.split);
  res.times.coarse_ms = ms_since(t0);

  t0 = clock::now();
  res.balls = split_all(ds, std::move(coarse), opt.split);
  res.times.split_ms = ms_since(t0);

  if (res.balls.size() < 2) {
    // Nothing to merge: one ball is one cluster.
    if (opt.k && *opt.k > 1)
      throw DegenerateInput("K=" + std::to_string(*opt.k) + " unreachable with a single ball");
    res.clustering.ball_labels = {0};
    res.clustering.point_labels.assign(ds.size(), 0);
    res.clustering.k = 1;
    res.clustering.knee_detected = opt.k.has_value();
    return res;
  }

  t0 = clock::now();
  const BallGraph graph(res.balls);
  res.times.graph_ms = ms_since(t0);

  t0 = clock::now();
  auto noise = detect_noise_balls(res.balls, opt.merge.noise_factor);
  res.clustering = opt.k ? merge_to_k(res.balls, graph, *opt.k, std::move(noise), opt.merge)
                         : adaptive_merge(res.balls, graph, std::move(noise), opt.merge);
  res.times.merge_ms = ms_since(t0);
  return res;
}

}  // namespace gbct
