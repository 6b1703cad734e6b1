#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"

namespace gbct {

enum class Shape { moons, circles, blobs, spiral };

inline Shape parse_shape(std::string_view name) {
  if (name == "moons") return Shape::moons;
  if (name == "circles") return Shape::circles;
  if (name == "blobs") return Shape::blobs;
  if (name == "spiral") return Shape::spiral;
  throw InvalidArgument("unknown shape '" + std::string(name) + "'");
}

struct GeneratorParams {
  // Std-dev of the Gaussian jitter added to moons, circles and spiral points.
  double jitter = 0.05;
  // Inner/outer radius ratio for circles.
  double factor = 0.5;
  // Blob centers; all must share one dimension.
  std::vector<std::vector<double>> centers;
  double cluster_std = 1.0;
  // Number of full turns of each spiral arm.
  double turns = 1.5;
};

/// `k` centers drawn uniformly from [-box, box]^dim.
inline std::vector<std::vector<double>> random_centers(std::size_t k, std::size_t dim,
                                                       double box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-box, box);
  std::vector<std::vector<double>> c(k, std::vector<double>(dim));
  for (auto& row : c)
    for (auto& v : row) v = u(rng);
  return c;
}

namespace gen_detail {

// Evenly spaced values over [lo, hi]; a single value maps to lo.
inline double lerp_index(double lo, double hi, std::size_t i, std::size_t count) {
  if (count < 2) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

}  // namespace gen_detail

/// Labelled synthetic dataset. Output is a pure function of the arguments.
inline Dataset generate(Shape shape, std::size_t n, const GeneratorParams& params,
                        std::uint64_t seed) {
  const std::size_t clusters = shape == Shape::blobs ? params.centers.size() : 2;
  if (clusters == 0) throw InvalidArgument("blobs need at least one center");
  if (params.jitter < 0.0 || !std::isfinite(params.jitter))
    throw InvalidArgument("jitter must be a finite non-negative number");
  if (n < 2 * clusters)
    throw InvalidArgument("n must be at least " + std::to_string(2 * clusters) + " for this shape");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> coords;
  std::vector<int> labels;
  labels.reserve(n);

  const std::size_t first = n / 2;
  const std::size_t second = n - first;
  const double pi = std::numbers::pi;

  auto push2 = [&](double x, double y, int label) {
    coords.push_back(x + params.jitter * gauss(rng));
    coords.push_back(y + params.jitter * gauss(rng));
    labels.push_back(label);
  };

  switch (shape) {
    case Shape::moons: {
      for (std::size_t i = 0; i < first; ++i) {
        const double t = gen_detail::lerp_index(0.0, pi, i, first);
        push2(std::cos(t), std::sin(t), 0);
      }
      for (std::size_t i = 0; i < second; ++i) {
        const double t = gen_detail::lerp_index(0.0, pi, i, second);
        push2(1.0 - std::cos(t), 0.5 - std::sin(t), 1);
      }
      return Dataset(2, std::move(coords), std::move(labels));
    }
    case Shape::circles: {
      if (!(params.factor > 0.0 && params.factor < 1.0))
        throw InvalidArgument("circles factor must lie in (0, 1)");
      for (std::size_t i = 0; i < first; ++i) {
        const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(first);
        push2(std::cos(t), std::sin(t), 0);
      }
      for (std::size_t i = 0; i < second; ++i) {
        const double t = 2.0 * pi * static_cast<double>(i) / static_cast<double>(second);
        push2(params.factor * std::cos(t), params.factor * std::sin(t), 1);
      }
      return Dataset(2, std::move(coords), std::move(labels));
    }
    case Shape::spiral: {
      if (!(params.turns > 0.0)) throw InvalidArgument("spiral turns must be positive");
      // Archimedean arm r = theta / (2 pi); the second arm is the first rotated by pi.
      const double start = 0.5 * pi;
      const double stop = start + params.turns * 2.0 * pi;
      for (int arm = 0; arm < 2; ++arm) {
        const std::size_t count = arm == 0 ? first : second;
        const double sign = arm == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < count; ++i) {
          const double theta = gen_detail::lerp_index(start, stop, i, count);
          const double r = theta / (2.0 * pi);
          push2(sign * r * std::cos(theta), sign * r * std::sin(theta), arm);
        }
      }
      return Dataset(2, std::move(coords), std::move(labels));
    }
    case Shape::blobs: {
      if (params.cluster_std < 0.0 || !std::isfinite(params.cluster_std))
        throw InvalidArgument("cluster_std must be a finite non-negative number");
      const std::size_t dim = params.centers.front().size();
      if (dim == 0) throw InvalidArgument("blob centers must have at least one coordinate");
      for (const auto& c : params.centers) {
        if (c.size() != dim) throw InvalidArgument("blob centers differ in dimension");
      }
      const std::size_t base = n / clusters;
      const std::size_t extra = n % clusters;
      for (std::size_t c = 0; c < clusters; ++c) {
        const std::size_t count = base + (c < extra ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i) {
          for (std::size_t k = 0; k < dim; ++k)
            coords.push_back(params.centers[c][k] + params.cluster_std * gauss(rng));
          labels.push_back(static_cast<int>(c));
        }
      }
      return Dataset(dim, std::move(coords), std::move(labels));
    }
  }
  throw InvalidArgument("unhandled shape");
}

/// Appends ceil(fraction * n) points drawn uniformly over the bounding box of
/// `ds`, labelled kNoiseLabel. Original points keep their order, coordinates
/// and labels. If `ds` is unlabelled the result is unlabelled as well.
inline Dataset inject_noise(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw InvalidArgument("noise fraction must lie in [0, 1)");
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  const auto extra =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (extra == 0) return ds;

  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = ds.point(i);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> coords = ds.coords();
  coords.reserve(coords.size() + extra * d);
  for (std::size_t j = 0; j < extra; ++j) {
    for (std::size_t k = 0; k < d; ++k)
      coords.push_back(std::clamp(lo[k] + (hi[k] - lo[k]) * u(rng), lo[k], hi[k]));
  }
  if (!ds.has_labels()) return Dataset(d, std::move(coords));
  std::vector<int> labels = *ds.labels();
  labels.resize(n + extra, kNoiseLabel);
  return Dataset(d, std::move(coords), std::move(labels));
}

}  // namespace gbct
