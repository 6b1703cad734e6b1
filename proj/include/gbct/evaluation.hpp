#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gbct/dataset.hpp"
#include "gbct/error.hpp"

namespace gbct {

/// Co-occurrence counts of predicted (rows) against true (columns) labels.
struct ContingencyTable {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<int> pred_ids;  // original label of each row
  std::vector<int> true_ids;  // original label of each column
  std::size_t n = 0;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return counts.empty() ? 0 : counts.front().size(); }
};

/// Builds the table after dropping positions whose truth label is kNoiseLabel.
inline ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size())
    throw InvalidArgument("label sequences differ in length (" + std::to_string(pred.size()) +
                          " vs " + std::to_string(truth.size()) + ")");
  if (pred.empty()) throw InvalidArgument("label sequences are empty");

  std::map<int, std::size_t> prow, tcol;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == kNoiseLabel) continue;
    prow.emplace(pred[i], 0);
    tcol.emplace(truth[i], 0);
  }
  if (prow.empty()) throw InvalidArgument("no non-noise positions to score");

  ContingencyTable t;
  for (auto& [label, idx] : prow) {
    idx = t.pred_ids.size();
    t.pred_ids.push_back(label);
  }
  for (auto& [label, idx] : tcol) {
    idx = t.true_ids.size();
    t.true_ids.push_back(label);
  }
  t.counts.assign(prow.size(), std::vector<std::size_t>(tcol.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == kNoiseLabel) continue;
    ++t.counts[prow[pred[i]]][tcol[truth[i]]];
    ++t.n;
  }
  return t;
}

/// Maximum-weight matching of rows onto columns (Hungarian method with
/// potentials on the zero-padded square matrix). Entry r of the result is the
/// column matched to row r, or -1 when the row is left unmatched.
inline std::vector<int> optimal_label_map(const ContingencyTable& table) {
  if (table.rows() == 0 || table.cols() == 0) throw InvalidArgument("empty contingency table");
  const std::size_t size = std::max(table.rows(), table.cols());
  auto cost = [&](std::size_t r, std::size_t c) -> double {
    if (r >= table.rows() || c >= table.cols()) return 0.0;
    return -static_cast<double>(table.counts[r][c]);
  };

  // 1-based arrays; way/match index 0 is the virtual root.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0);
  std::vector<std::size_t> match(size + 1, 0), way(size + 1, 0);
  for (std::size_t row = 1; row <= size; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(size + 1, inf);
    std::vector<char> used(size + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= size; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= size; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<int> map(table.rows(), -1);
  for (std::size_t c = 1; c <= size; ++c) {
    const std::size_t r = match[c] - 1;
    if (r < table.rows() && c - 1 < table.cols()) map[r] = static_cast<int>(c - 1);
  }
  return map;
}

/// Fraction of points whose cluster maps onto their class under the best
/// one-to-one cluster/class assignment.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
  const auto table = contingency(pred, truth);
  const auto map = optimal_label_map(table);
  std::size_t hit = 0;
  for (std::size_t r = 0; r < map.size(); ++r)
    if (map[r] >= 0) hit += table.counts[r][static_cast<std::size_t>(map[r])];
  return static_cast<double>(hit) / static_cast<double>(table.n);
}

enum class NmiNorm { geometric, arithmetic };

/// Mutual information over the normalising mean of the two entropies
/// (natural logs). Two single-cluster partitions score 1; a single-cluster
/// partition against a non-trivial one scores 0.
inline double nmi(std::span<const int> pred, std::span<const int> truth,
                  NmiNorm norm = NmiNorm::geometric) {
  const auto t = contingency(pred, truth);
  const double n = static_cast<double>(t.n);
  std::vector<double> row(t.rows(), 0.0), col(t.cols(), 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) {
      row[r] += static_cast<double>(t.counts[r][c]);
      col[c] += static_cast<double>(t.counts[r][c]);
    }
  // Terms are summed in sorted order so that relabelling, which only permutes
  // rows and columns, gives bit-identical results.
  auto sorted_sum = [](std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double x : terms) s += x;
    return s;
  };
  auto entropy = [n, &sorted_sum](const std::vector<double>& marg) {
    std::vector<double> terms;
    for (double x : marg)
      if (x > 0.0) terms.push_back(-(x / n) * std::log(x / n));
    return sorted_sum(std::move(terms));
  };
  const double hu = entropy(row);
  const double hv = entropy(col);
  if (hu <= 0.0 && hv <= 0.0) return 1.0;
  if (hu <= 0.0 || hv <= 0.0) return 0.0;

  std::vector<double> terms;
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) {
      const double x = static_cast<double>(t.counts[r][c]);
      if (x > 0.0) terms.push_back((x / n) * std::log(x * n / (row[r] * col[c])));
    }
  const double mi = sorted_sum(std::move(terms));
  const double denom = norm == NmiNorm::geometric ? std::sqrt(hu * hv) : 0.5 * (hu + hv);
  return std::clamp(mi / denom, 0.0, 1.0);
}

}  // namespace gbct
