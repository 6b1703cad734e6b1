#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gbct/cluster_formation.hpp"
#include "gbct/generators.hpp"
#include "gbct/pipeline.hpp"
#include "oracles.hpp"

using namespace gbct;

namespace {

GranularBall disc(std::vector<double> center, double r) {
  GranularBall b;
  b.center = std::move(center);
  b.max_radius = r;
  return b;
}

// One 2-point ball per center on the real line: points c - r and c + r.
struct LineBalls {
  Dataset ds;
  BallSet balls;
};

LineBalls line_balls(const std::vector<double>& centers, double r,
                     const std::vector<double>& singletons = {}) {
  std::vector<double> xs;
  for (double c : centers) {
    xs.push_back(c - r);
    xs.push_back(c + r);
  }
  for (double s : singletons) xs.push_back(s);
  LineBalls out{Dataset(1, xs), {}};
  out.balls.point_count = xs.size();
  for (std::size_t i = 0; i < centers.size(); ++i)
    out.balls.balls.push_back(fit_stats(out.ds, {2 * i, 2 * i + 1}));
  for (std::size_t i = 0; i < singletons.size(); ++i)
    out.balls.balls.push_back(fit_stats(out.ds, {2 * centers.size() + i}));
  return out;
}

BallSet with_log_densities(const std::vector<double>& dens) {
  BallSet s;
  for (std::size_t i = 0; i < dens.size(); ++i) {
    GranularBall b = disc({double(i)}, 1.0);
    b.members = {2 * i, 2 * i + 1};
    b.log_max_density = std::log(dens[i]);
    s.balls.push_back(b);
  }
  s.point_count = 2 * dens.size();
  return s;
}

std::set<std::set<std::size_t>> groups(const std::vector<int>& labels) {
  std::map<int, std::set<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [_, g] : by) out.insert(g);
  return out;
}

Dataset blobs(std::vector<std::vector<double>> centers, std::size_t n, std::uint64_t seed) {
  GeneratorParams p;
  p.centers = std::move(centers);
  p.cluster_std = 1.0;
  return generate(Shape::blobs, n, p, seed);
}

}  // namespace

TEST(BallGraph, RawDistanceAndOverlap) {
  BallSet s;
  s.balls = {disc({0, 0}, 1), disc({7, 0}, 1)};
  const BallGraph far(s);
  EXPECT_DOUBLE_EQ(far.raw(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(far.delta(), 0.0);
  EXPECT_DOUBLE_EQ(far.sim(0, 1), 0.2);
  EXPECT_EQ(far.sim(0, 0), 0.0);

  s.balls = {disc({0, 0}, 1), disc({1, 0}, 1)};
  EXPECT_DOUBLE_EQ(BallGraph(s).raw(0, 1), -1.0);
}

TEST(BallGraph, ShiftMakesEveryDistancePositive) {
  BallSet s;
  s.balls = {disc({0, 0}, 1), disc({1, 0}, 1), disc({0.5, std::sqrt(48.75)}, 1)};
  const BallGraph g(s);
  EXPECT_DOUBLE_EQ(g.delta(), 2.0);
  EXPECT_NEAR(g.shifted(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(g.shifted(0, 2), 7.0, 1e-12);
  EXPECT_NEAR(g.shifted(1, 2), 7.0, 1e-12);
  EXPECT_EQ(g.shifted(1, 1), 0.0);
  EXPECT_NEAR(g.sim(0, 1), 1.0, 1e-12);
}

TEST(BallGraph, SymmetricAndPositiveOnRandomBalls) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5, 5), rad(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    BallSet s;
    const std::size_t m = 2 + rng() % 20;
    for (std::size_t i = 0; i < m; ++i) s.balls.push_back(disc({u(rng), u(rng)}, rad(rng)));
    const BallGraph g(s);
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_EQ(g.sim(i, i), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        EXPECT_EQ(g.raw(i, j), g.raw(j, i));
        EXPECT_EQ(g.sim(i, j), g.sim(j, i));
        if (i != j) {
          EXPECT_GT(g.shifted(i, j), 0.0);
          EXPECT_GT(g.sim(i, j), 0.0);
        }
      }
    }
  }
}

TEST(BallGraph, NeedsTwoBalls) {
  BallSet s;
  s.balls = {disc({0}, 1)};
  EXPECT_THROW(BallGraph{s}, InvalidArgument);
}

TEST(NoiseBalls, SparseBallIsFlagged) {
  EXPECT_EQ(detect_noise_balls(with_log_densities({10, 10, 10, 1})),
            (std::vector<std::size_t>{3}));
  EXPECT_TRUE(detect_noise_balls(with_log_densities({4, 4, 4, 4})).empty());
  // noise_factor 0 never flags a multi-point ball
  EXPECT_TRUE(detect_noise_balls(with_log_densities({10, 10, 10, 1}), 0.0).empty());
}

TEST(NoiseBalls, SingletonsAreNoise) {
  const auto lb = line_balls({0, 10}, 0.5, {40});
  EXPECT_EQ(detect_noise_balls(lb.balls), (std::vector<std::size_t>{2}));
}

TEST(NoiseBalls, AllNoiseIsDegenerate) {
  const Dataset ds(1, {0, 5, 9});
  BallSet s;
  s.point_count = 3;
  s.balls = {fit_stats(ds, {0}), fit_stats(ds, {1}), fit_stats(ds, {2})};
  EXPECT_THROW(detect_noise_balls(s), DegenerateInput);
}

TEST(ClusterSimilarity, IsMaxOverBallPairs) {
  const auto lb = line_balls({0, 1, 10, 11}, 0.2);
  const BallGraph g(lb.balls);
  const std::vector<std::size_t> a{0, 1}, b{2, 3};
  EXPECT_DOUBLE_EQ(cluster_similarity(a, b, g), g.sim(1, 2));
  EXPECT_DOUBLE_EQ(cluster_similarity(a, b, g), cluster_similarity(b, a, g));
  EXPECT_NEAR(cluster_similarity(std::vector<std::size_t>{0}, std::vector<std::size_t>{3}, g),
              1.0 / 10.6, 1e-12);
}

TEST(MergeToK, FourBallsOnALine) {
  const auto lb = line_balls({0, 1, 10, 11}, 0.2);
  const BallGraph g(lb.balls);
  const Clustering c = merge_to_k(lb.balls, g, 2);
  EXPECT_EQ(c.k, 2u);
  EXPECT_EQ(groups(c.ball_labels), (std::set<std::set<std::size_t>>{{0, 1}, {2, 3}}));
  EXPECT_EQ(c.point_labels, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
  ASSERT_EQ(c.trace.size(), 1u);
  EXPECT_NEAR(c.trace[0].min_merge_distance, 0.6, 1e-12);
  EXPECT_EQ(c.trace[0].clusters_after, 2u);

  const Clustering one = merge_to_k(lb.balls, g, 1);
  EXPECT_EQ(one.k, 1u);
  ASSERT_EQ(one.trace.size(), 2u);
  EXPECT_NEAR(one.trace[1].min_merge_distance, 8.6, 1e-12);
  EXPECT_EQ(one.trace[1].merges.size(), 1u);
}

TEST(MergeToK, UnreachableTargetsAreDegenerate) {
  const auto lb = line_balls({0, 1, 10, 11}, 0.2);
  const BallGraph g(lb.balls);
  EXPECT_THROW(merge_to_k(lb.balls, g, 4), DegenerateInput);
  EXPECT_THROW(merge_to_k(lb.balls, g, 3), DegenerateInput);
  EXPECT_THROW(merge_to_k(lb.balls, g, 5), DegenerateInput);
  EXPECT_THROW(merge_to_k(lb.balls, g, 0), InvalidArgument);
  try {
    merge_to_k(lb.balls, g, 4);
  } catch (const DegenerateInput& e) {
    EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos);
  }
}

TEST(MergeToK, NoiseBallJoinsNearestCluster) {
  const auto lb = line_balls({0, 1, 10, 11}, 0.2, {5});
  const BallGraph g(lb.balls);
  const Clustering c = merge_to_k(lb.balls, g, 2);
  EXPECT_EQ(c.noise_balls, (std::vector<std::size_t>{4}));
  EXPECT_EQ(groups(c.ball_labels), (std::set<std::set<std::size_t>>{{0, 1, 4}, {2, 3}}));
  EXPECT_EQ(c.point_labels.back(), c.point_labels.front());
}

TEST(MergeToK, LiteralSecondFullRoundOvershoots) {
  const auto lb = line_balls({0, 1, 10, 11, 30, 31}, 0.2);
  const BallGraph g(lb.balls);
  const Clustering c = merge_to_k(lb.balls, g, 2);
  EXPECT_EQ(groups(c.ball_labels), (std::set<std::set<std::size_t>>{{0, 1, 2, 3}, {4, 5}}));
  MergeConfig literal;
  literal.full_rounds = 2;
  EXPECT_THROW(merge_to_k(lb.balls, g, 2, literal), DegenerateInput);
  EXPECT_EQ(merge_to_k(lb.balls, g, 3, literal).k, 3u);
}

TEST(MergeToK, MatchesSingleLinkageWhenNoClusterIsASingleBall) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-20, 20), jit(-0.5, 0.5);
  int tested = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t m = 3 + rng() % 10;
    std::vector<double> xs;
    for (std::size_t i = 0; i < m; ++i) {
      const double cx = u(rng), cy = u(rng);
      for (int p = 0; p < 3; ++p) {
        xs.push_back(cx + jit(rng));
        xs.push_back(cy + jit(rng));
      }
    }
    const Dataset ds(2, xs);
    BallSet s;
    s.point_count = 3 * m;
    for (std::size_t i = 0; i < m; ++i) s.balls.push_back(fit_stats(ds, {3 * i, 3 * i + 1, 3 * i + 2}));
    const BallGraph g(s);
    std::vector<std::vector<double>> dist(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) dist[i][j] = g.shifted(i, j);
    const std::size_t k = 1 + rng() % (m / 2);
    const auto expect = oracle::single_linkage(dist, k);
    std::vector<int> sizes(k, 0);
    for (int l : expect) ++sizes[l];
    if (*std::min_element(sizes.begin(), sizes.end()) < 2) continue;
    ++tested;
    const Clustering c = merge_to_k(s, g, k, std::vector<std::size_t>{});
    EXPECT_EQ(c.k, k);
    EXPECT_TRUE(oracle::same_partition(c.ball_labels, expect)) << "trial " << trial;
  }
  EXPECT_GE(tested, 100);
}

TEST(MergeToK, ExactlyKOnRandomBlobs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t clusters = 1 + rng() % 5;
    const Dataset ds = blobs(random_centers(clusters, 2, 15.0, rng()), 60 + rng() % 400, rng());
    SplitConfig sc;
    sc.seed = rng();
    const BallSet balls = generate_balls(ds, sc);
    if (balls.size() < 2) continue;
    const BallGraph g(balls);
    const Clustering one = merge_to_k(balls, g, 1);
    ASSERT_FALSE(one.trace.empty());
    const std::size_t reachable = one.trace[0].clusters_after;
    const std::size_t k = 1 + rng() % reachable;
    const Clustering c = merge_to_k(balls, g, k);
    EXPECT_EQ(c.k, k);
    EXPECT_EQ(std::set<int>(c.point_labels.begin(), c.point_labels.end()).size(), k);
    EXPECT_EQ(c.point_labels, point_labels(c, balls));
    for (std::size_t t = 0; t < c.trace.size(); ++t) {
      EXPECT_EQ(c.trace[t].round_index, t + 1);
      EXPECT_GT(c.trace[t].min_merge_distance, 0.0);
      if (t > 0) {
        EXPECT_LT(c.trace[t].clusters_after, c.trace[t - 1].clusters_after);
      }
    }
    EXPECT_EQ(c.trace.back().clusters_after, k);
  }
}

TEST(AdaptiveMerge, FindsTwoGroupsOnTheLine) {
  const auto lb = line_balls({0, 1, 10, 11}, 0.2);
  const Clustering c = adaptive_merge(lb.balls, BallGraph(lb.balls));
  EXPECT_TRUE(c.knee_detected);
  EXPECT_EQ(c.k, 2u);
  EXPECT_EQ(groups(c.ball_labels), (std::set<std::set<std::size_t>>{{0, 1}, {2, 3}}));
}

TEST(AdaptiveMerge, EvenSpacingHasNoKnee) {
  const auto lb = line_balls({0, 1, 2, 3, 4, 5}, 0.2);
  const Clustering c = adaptive_merge(lb.balls, BallGraph(lb.balls));
  EXPECT_FALSE(c.knee_detected);
  EXPECT_EQ(c.k, 1u);
}

TEST(AdaptiveMerge, ThreeBlobs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = blobs({{0, 0}, {12, 0}, {6, 10}}, 600, seed);
    FitOptions opt;
    opt.split.seed = seed;
    const FitResult r = fit(ds, opt);
    EXPECT_TRUE(r.clustering.knee_detected) << "seed " << seed;
    EXPECT_EQ(r.clustering.k, 3u) << "seed " << seed;
  }
}

TEST(AdaptiveMerge, SingleBlobReportsNoKnee) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = blobs({{0, 0}}, 500, seed);
    FitOptions opt;
    opt.split.seed = seed;
    EXPECT_FALSE(fit(ds, opt).clustering.knee_detected) << "seed " << seed;
  }
}

TEST(Fit, LabelsInvariantUnderScaling) {
  GeneratorParams p;
  const Dataset ds = generate(Shape::moons, 600, p, 4);
  std::vector<double> scaled(ds.coords().begin(), ds.coords().end());
  for (auto& v : scaled) v *= 10.0;
  FitOptions opt;
  opt.k = 2;
  const auto a = fit(ds, opt).clustering.point_labels;
  const auto b = fit(Dataset(2, scaled), opt).clustering.point_labels;
  EXPECT_EQ(a, b);
}

TEST(Fit, SingleBallGivesOneCluster) {
  const Dataset ds(2, {0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1});
  FitOptions opt;
  const FitResult r = fit(ds, opt);
  EXPECT_EQ(r.clustering.k, 1u);
  EXPECT_EQ(r.clustering.point_labels, (std::vector<int>(4, 0)));
  opt.k = 2;
  EXPECT_THROW(fit(ds, opt), DegenerateInput);
}

TEST(MergeConfig, Validation) {
  MergeConfig c;
  c.full_rounds = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.jump_factor = 1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.noise_factor = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Trace, CsvHasOneRowPerRound) {
  oracle::TempDir dir;
  const auto lb = line_balls({0, 1, 10, 11}, 0.2);
  const Clustering c = merge_to_k(lb.balls, BallGraph(lb.balls), 1);
  const std::string path = dir.file("trace.csv");
  save_trace_csv(path, c.trace);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "round_index,merges_applied,min_merge_distance");
  EXPECT_EQ(lines[1].substr(0, 4), "1,2,");
  EXPECT_EQ(lines[2].substr(0, 4), "2,1,");
  EXPECT_THROW(save_trace_csv(dir.file("no/such/dir.csv"), c.trace), IoError);
}
