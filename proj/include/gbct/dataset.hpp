#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbct/error.hpp"

namespace gbct {

/// Label reserved for injected noise points.
inline constexpr int kNoiseLabel = -1;

/// Row-major table of n points in d dimensions with optional integer labels.
///
/// Coordinates are stored contiguously; `point(i)` is a view into that
/// storage. Instances are validated on construction and never mutated
/// afterwards, so they can be shared freely between threads.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t dim, std::vector<double> coords,
          std::optional<std::vector<int>> labels = std::nullopt)
      : dim_(dim), coords_(std::move(coords)), labels_(std::move(labels)) {
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be >= 1");
    if (coords_.empty() || coords_.size() % dim_ != 0)
      throw InvalidArgument("coordinate count must be a positive multiple of the dimension");
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (!std::isfinite(coords_[i]))
        throw InvalidArgument("non-finite coordinate in point " + std::to_string(i / dim_));
    }
    if (labels_) {
      if (labels_->size() != size())
        throw InvalidArgument("label count " + std::to_string(labels_->size()) +
                              " does not match point count " + std::to_string(size()));
      for (int l : *labels_) {
        if (l < kNoiseLabel) throw InvalidArgument("labels must be >= -1");
      }
    }
  }

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }

  const std::vector<double>& coords() const { return coords_; }
  bool has_labels() const { return labels_.has_value(); }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::optional<std::vector<int>> labels_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

/// Per-dimension z-scoring with the population standard deviation.
/// Dimensions with zero variance are passed through unchanged.
inline Dataset standardize(const Dataset& ds) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  if (n < 2) throw InvalidArgument("standardize needs at least 2 points");
  std::vector<double> out = ds.coords();
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += out[i * d + k];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = out[i * d + k] - mean;
      var += t * t;
    }
    var /= static_cast<double>(n);
    if (var <= 0.0) continue;
    const double sd = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) out[i * d + k] = (out[i * d + k] - mean) / sd;
  }
  return Dataset(d, std::move(out), ds.labels());
}

}  // namespace gbct
