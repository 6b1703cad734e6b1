#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"

namespace gbct {

/// splitmix64 finaliser; derives independent stream seeds from (seed, salt).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Lloyd's k-means over a subset of the dataset with k-means++ seeding.
///
/// Returns the non-empty groups in cluster-index order; each group lists its
/// member indices in the order they appear in `members`. Ties in the
/// assignment step go to the lower cluster index, so the result is a pure
/// function of (dataset, members, k, max_iters, seed). If the members hold
/// fewer than k distinct points, fewer groups are returned.
inline std::vector<std::vector<std::size_t>> kmeans_partition(
    const Dataset& ds, std::span<const std::size_t> members, std::size_t k,
    std::size_t max_iters, std::uint64_t seed) {
  const std::size_t n = members.size();
  const std::size_t d = ds.dim();
  if (n == 0) throw InvalidArgument("k-means on an empty member set");
  if (k == 0) throw InvalidArgument("k-means needs k >= 1");
  if (k > n) k = n;

  // Member coordinates, contiguous.
  std::vector<double> pts(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = ds.point(members[i]);
    std::copy(p.begin(), p.end(), pts.begin() + i * d);
  }
  auto point = [&](std::size_t i) { return std::span<const double>(pts.data() + i * d, d); };

  std::mt19937_64 rng(seed);
  std::vector<double> centers;
  centers.reserve(k * d);
  auto center = [&](std::size_t c) { return std::span<const double>(centers.data() + c * d, d); };
  auto add_center = [&](std::size_t i) {
    const auto p = point(i);
    centers.insert(centers.end(), p.begin(), p.end());
  };

  // k-means++ spreading. owner[i] is the closest center so far; a new center
  // c can only improve point i when |c - owner| < 2 |i - owner|.
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  add_center(pick(rng));
  std::vector<double> nearest(n);
  std::vector<std::size_t> owner(n, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nearest[i] = squared_distance(point(i), center(0));
    total += nearest[i];
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> gap_sq;
  while (centers.size() / d < k) {
    if (!(total > 0.0)) break;
    const double target = unit(rng) * total;
    double acc = 0.0;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      acc += nearest[i];
      if (nearest[i] > 0.0 && acc >= target) {
        chosen = i;
        break;
      }
    }
    if (chosen == n) {
      for (std::size_t i = n; i-- > 0;) {
        if (nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    add_center(chosen);
    const std::size_t cn = centers.size() / d - 1;
    const auto c = center(cn);
    gap_sq.resize(cn);
    for (std::size_t o = 0; o < cn; ++o) gap_sq[o] = squared_distance(c, center(o));
    total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (gap_sq[owner[i]] < 4.0 * nearest[i]) {
        const double dist = squared_distance(point(i), c);
        if (dist < nearest[i]) {
          nearest[i] = dist;
          owner[i] = cn;
        }
      }
      total += nearest[i];
    }
  }
  const std::size_t kk = centers.size() / d;

  // Lloyd iterations with Hamerly's bounds: upper[i] bounds the distance to
  // the assigned center from above, lower[i] the distance to every other
  // center from below. A point is rescanned only when the bounds cannot prove
  // that its assigned center is still strictly closest. A rescan walks the
  // other centers by increasing distance from the assigned one and stops once
  // the triangle inequality rules out the rest. Assignments equal plain
  // Lloyd's, ties going to the lower index.
  std::vector<std::size_t> assign = std::move(owner);
  std::vector<double> upper(n), lower(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) upper[i] = std::sqrt(nearest[i]);

  std::vector<double> gap(kk * kk);  // center-center distances
  // order[a] lists the other centers by distance from a; only the first
  // sorted[a] entries are in order, extended on demand since most rescans stop
  // after a few neighbours.
  std::vector<std::vector<std::pair<double, std::size_t>>> order(kk);
  std::vector<std::size_t> sorted(kk, 0);
  std::vector<char> built(kk, 0);
  auto rescan = [&](std::size_t i) {
    const auto p = point(i);
    const std::size_t a = assign[i];
    auto& o = order[a];
    if (!built[a]) {
      o.clear();
      for (std::size_t c = 0; c < kk; ++c)
        if (c != a) o.emplace_back(gap[a * kk + c], c);
      sorted[a] = 0;
      built[a] = 1;
    }
    const double here = std::sqrt(squared_distance(p, center(a)));
    double best_d = here, second_d = std::numeric_limits<double>::infinity();
    std::size_t best = a;
    for (std::size_t j = 0; j < o.size(); ++j) {
      if (j == sorted[a]) {
        const std::size_t upto = std::min(o.size(), std::max<std::size_t>(8, 2 * j));
        std::partial_sort(o.begin() + j, o.begin() + upto, o.end());
        sorted[a] = upto;
      }
      const auto [g, c] = o[j];
      if (g - here > second_d) break;
      const double dist = std::sqrt(squared_distance(p, center(c)));
      if (dist < best_d || (dist == best_d && c < best)) {
        second_d = best_d;
        best_d = dist;
        best = c;
      } else if (dist < second_d) {
        second_d = dist;
      }
    }
    assign[i] = best;
    upper[i] = best_d;
    lower[i] = second_d;
    return best != a;
  };

  std::vector<double> sums(kk * d);
  std::vector<std::size_t> counts(kk);
  std::vector<double> old(kk * d), shift(kk), half_gap(kk);
  for (std::size_t iter = 1; iter < max_iters && kk > 1; ++iter) {
    old = centers;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = point(i);
      ++counts[assign[i]];
      for (std::size_t j = 0; j < d; ++j) sums[assign[i] * d + j] += p[j];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] == 0) continue;  // empty: keep the old center, dropped below
      for (std::size_t j = 0; j < d; ++j)
        centers[c * d + j] = sums[c * d + j] / static_cast<double>(counts[c]);
    }

    std::size_t far = 0;
    for (std::size_t c = 0; c < kk; ++c) {
      shift[c] = std::sqrt(squared_distance({old.data() + c * d, d}, center(c)));
      if (shift[c] > shift[far]) far = c;
    }
    double runner_up = 0.0;
    for (std::size_t c = 0; c < kk; ++c)
      if (c != far) runner_up = std::max(runner_up, shift[c]);
    for (std::size_t c = 0; c < kk; ++c) {
      gap[c * kk + c] = 0.0;
      for (std::size_t o = c + 1; o < kk; ++o)
        gap[c * kk + o] = gap[o * kk + c] = std::sqrt(squared_distance(center(c), center(o)));
    }
    for (std::size_t c = 0; c < kk; ++c) {
      double g = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < kk; ++o)
        if (o != c) g = std::min(g, gap[c * kk + o]);
      half_gap[c] = 0.5 * g;
    }
    std::fill(built.begin(), built.end(), 0);

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = assign[i];
      upper[i] += shift[a];
      lower[i] -= a == far ? runner_up : shift[far];
      const double bound = std::max(half_gap[a], lower[i]);
      if (upper[i] < bound) continue;
      upper[i] = std::sqrt(squared_distance(point(i), center(a)));
      if (upper[i] < bound) continue;
      changed = rescan(i) || changed;
    }
    if (!changed) break;
  }

  std::vector<std::vector<std::size_t>> groups(kk);
  for (std::size_t i = 0; i < n; ++i) groups[assign[i]].push_back(members[i]);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

}  // namespace gbct
