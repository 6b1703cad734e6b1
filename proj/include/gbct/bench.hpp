#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gbct/generators.hpp"
#include "gbct/pipeline.hpp"

namespace gbct {

struct BenchRow {
  std::size_t n = 0;
  std::size_t m = 0;
  double split_ms = 0.0;  // coarse + fine division
  double merge_ms = 0.0;  // graph + merging
  double total_ms = 0.0;
};

/// The fixed workload behind the size ladder: four unit-variance Gaussian
/// blobs in the plane, clustered with K = 4.
inline Dataset bench_dataset(std::size_t n, std::uint64_t seed) {
  GeneratorParams p;
  p.centers = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 9.0}, {-5.0, 9.0}};
  p.cluster_std = 1.0;
  return generate(Shape::blobs, n, p, seed);
}

/// Times fit() for each size; every timing is the median over `repeats` runs.
inline std::vector<BenchRow> run_ladder(const std::vector<std::size_t>& sizes,
                                        std::size_t repeats, std::uint64_t seed) {
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    const Dataset ds = bench_dataset(n, seed);
    FitOptions opt;
    opt.k = 4;
    opt.split.seed = seed;
    std::vector<double> split, merge, total;
    BenchRow row;
    row.n = n;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
      const FitResult res = fit(ds, opt);
      row.m = res.balls.size();
      split.push_back(res.times.coarse_ms + res.times.split_ms);
      merge.push_back(res.times.graph_ms + res.times.merge_ms);
      total.push_back(res.times.total_ms());
    }
    row.split_ms = median(split);
    row.merge_ms = median(merge);
    row.total_ms = median(total);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gbct
