// gbct: batch front end for granular-ball clustering.
//
//   gbct fit   --input data.csv --output labels.csv [--k K | --adaptive] ...
//   gbct gen   --shape moons --n 1000 --output data.csv
//   gbct eval  --pred labels.csv --truth data.csv --truth-col 2
//   gbct plot  --input data.csv --output plot.svg [--labels labels.csv] [--balls]
//   gbct bench [--sizes 1000,2000,4000,8000]
//
// Results go to stdout, diagnostics to stderr. Exit status: 0 success,
// 1 usage/I-O/parse error, 2 degenerate input (unreachable K, plot dims).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbct/gbct.hpp"

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  std::size_t k = 0;  // 0: adaptive
  bool adaptive = false;
  double threshold = 0.70;
  std::string split_policy = "consistent";
  double noise_factor = 0.2;
  double jump_factor = 2.0;
  std::size_t full_rounds = 1;
  std::uint64_t seed = 42;
  bool standardize = false;
  int label_col = -1;
  bool header = false;
  std::string trace_out;
};

struct GenConfig {
  std::string shape = "moons";
  std::size_t n = 1000;
  double jitter = 0.05;
  double factor = 0.5;
  double turns = 1.5;
  std::size_t centers = 3;
  std::size_t dim = 2;
  double cluster_std = 1.0;
  double noise = 0.0;
  std::uint64_t seed = 42;
  std::string output;
};

struct EvalConfig {
  std::string pred;
  std::string truth;
  std::size_t pred_col = 0;
  std::size_t truth_col = 0;
  bool header = false;
  std::string mean = "geometric";
};

struct PlotConfig {
  std::string input;
  std::string output;
  std::string labels;
  std::string dims;
  int label_col = -1;
  bool header = false;
  bool balls = false;
  double threshold = 0.70;
  std::string split_policy = "consistent";
  std::uint64_t seed = 42;
};

struct BenchConfig {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t repeats = 3;
  std::uint64_t seed = 42;
};

// Degenerate inputs that are not library exceptions (e.g. plot dims).
struct UsageDegenerate : gbct::DegenerateInput {
  using gbct::DegenerateInput::DegenerateInput;
};

std::optional<std::size_t> column(int c) {
  if (c < 0) return std::nullopt;
  return static_cast<std::size_t>(c);
}

gbct::SplitConfig split_config(double threshold, const std::string& policy, std::uint64_t seed) {
  gbct::SplitConfig cfg;
  cfg.consistency_threshold = threshold;
  cfg.split_acceptance = gbct::parse_split_acceptance(policy);
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

int cmd_fit(const RunConfig& rc) {
  if (rc.adaptive && rc.k > 0) throw gbct::InvalidArgument("--k and --adaptive are exclusive");
  gbct::Dataset ds = gbct::load_csv(rc.input, rc.header, column(rc.label_col));
  if (rc.standardize) ds = gbct::standardize(ds);

  gbct::FitOptions opt;
  opt.split = split_config(rc.threshold, rc.split_policy, rc.seed);
  if (rc.k > 0) opt.k = rc.k;
  opt.merge.noise_factor = rc.noise_factor;
  opt.merge.jump_factor = rc.jump_factor;
  opt.merge.full_rounds = rc.full_rounds;
  opt.merge.validate();

  const gbct::FitResult res = gbct::fit(ds, opt);
  gbct::save_labels_csv(rc.output, res.clustering.point_labels);
  if (!rc.trace_out.empty()) gbct::save_trace_csv(rc.trace_out, res.clustering.trace);

  std::printf("points %zu\n", ds.size());
  std::printf("balls %zu\n", res.balls.size());
  std::printf("noise_balls %zu\n", res.clustering.noise_balls.size());
  std::printf("k %zu\n", res.clustering.k);
  if (!opt.k) std::printf("knee %s\n", res.clustering.knee_detected ? "yes" : "no");
  std::printf("coarse_ms %.3f\n", res.times.coarse_ms);
  std::printf("split_ms %.3f\n", res.times.split_ms);
  std::printf("graph_ms %.3f\n", res.times.graph_ms);
  std::printf("merge_ms %.3f\n", res.times.merge_ms);
  std::printf("total_ms %.3f\n", res.times.total_ms());
  if (!opt.k && !res.clustering.knee_detected)
    std::cerr << "gbct: no knee detected in the merge trace; reporting a single cluster\n";
  if (ds.has_labels()) {
    std::printf("acc %.6f\n", gbct::accuracy(res.clustering.point_labels, *ds.labels()));
    std::printf("nmi %.6f\n", gbct::nmi(res.clustering.point_labels, *ds.labels()));
  }
  return 0;
}

int cmd_gen(const GenConfig& gc) {
  const gbct::Shape shape = gbct::parse_shape(gc.shape);
  gbct::GeneratorParams p;
  p.jitter = gc.jitter;
  p.factor = gc.factor;
  p.turns = gc.turns;
  p.cluster_std = gc.cluster_std;
  if (shape == gbct::Shape::blobs) {
    if (gc.centers == 0) throw gbct::InvalidArgument("--centers must be >= 1");
    p.centers = gbct::random_centers(gc.centers, gc.dim, 10.0, gbct::mix_seed(gc.seed, 1));
  }
  gbct::Dataset ds = gbct::generate(shape, gc.n, p, gc.seed);
  if (gc.noise > 0.0) ds = gbct::inject_noise(ds, gc.noise, gbct::mix_seed(gc.seed, 2));
  gbct::save_csv(gc.output, ds);
  std::printf("points %zu\ndim %zu\n", ds.size(), ds.dim());
  return 0;
}

int cmd_eval(const EvalConfig& ec) {
  const auto pred = gbct::load_labels_csv(ec.pred, false, ec.pred_col);
  const auto truth = gbct::load_labels_csv(ec.truth, ec.header, ec.truth_col);
  gbct::NmiNorm norm = gbct::NmiNorm::geometric;
  if (ec.mean == "arithmetic")
    norm = gbct::NmiNorm::arithmetic;
  else if (ec.mean != "geometric")
    throw gbct::InvalidArgument("--nmi-mean must be geometric or arithmetic");
  std::printf("ACC %.6f\n", gbct::accuracy(pred, truth));
  std::printf("NMI %.6f\n", gbct::nmi(pred, truth, norm));
  return 0;
}

int cmd_plot(const PlotConfig& pc) {
  const gbct::Dataset ds = gbct::load_csv(pc.input, pc.header, column(pc.label_col));
  gbct::ScatterOptions opt;
  if (!pc.dims.empty()) {
    char comma = 0;
    std::istringstream in(pc.dims);
    if (!(in >> opt.dim_x >> comma >> opt.dim_y) || comma != ',' || !in.eof())
      throw gbct::InvalidArgument("--dims expects two indices like 0,1");
  } else if (ds.dim() != 2) {
    throw UsageDegenerate("data has " + std::to_string(ds.dim()) +
                          " dimensions; choose two with --dims i,j");
  }
  if (opt.dim_x >= ds.dim() || opt.dim_y >= ds.dim())
    throw UsageDegenerate("--dims index out of range");

  std::vector<int> labels;
  if (!pc.labels.empty())
    labels = gbct::load_labels_csv(pc.labels);
  else if (ds.has_labels())
    labels = *ds.labels();

  std::optional<gbct::BallSet> balls;
  if (pc.balls) balls = gbct::generate_balls(ds, split_config(pc.threshold, pc.split_policy, pc.seed));

  std::ofstream out(pc.output);
  if (!out) throw gbct::IoError("cannot open '" + pc.output + "' for writing");
  out << gbct::scatter_svg(ds, labels, balls ? &*balls : nullptr, opt);
  if (!out) throw gbct::IoError("write error on '" + pc.output + "'");
  std::printf("markers %zu\n", ds.size());
  return 0;
}

int cmd_bench(const BenchConfig& bc) {
  std::printf("n,m,split_ms,merge_ms,total_ms\n");
  for (const auto& row : gbct::run_ladder(bc.sizes, bc.repeats, bc.seed)) {
    std::printf("%zu,%zu,%.3f,%.3f,%.3f\n", row.n, row.m, row.split_ms, row.merge_ms,
                row.total_ms);
    std::fflush(stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granular-ball clustering"};
  app.require_subcommand(1);

  RunConfig rc;
  auto* fit = app.add_subcommand("fit", "Cluster a CSV dataset and write one label per point");
  fit->add_option("--input", rc.input, "Input CSV")->required();
  fit->add_option("--output", rc.output, "Output label file")->required();
  fit->add_option("--k", rc.k, "Number of clusters (omit for adaptive K)");
  fit->add_flag("--adaptive", rc.adaptive, "Detect K from the merge trace");
  fit->add_option("--threshold", rc.threshold, "Center-consistency threshold")->capture_default_str();
  fit->add_option("--split-policy", rc.split_policy, "both|either|consistent")->capture_default_str();
  fit->add_option("--noise-factor", rc.noise_factor, "Noise density factor")->capture_default_str();
  fit->add_option("--jump-factor", rc.jump_factor, "Adaptive knee ratio")->capture_default_str();
  fit->add_option("--full-rounds", rc.full_rounds, "Unrestricted merge rounds")->capture_default_str();
  fit->add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  fit->add_flag("--standardize", rc.standardize, "Z-score every feature first");
  fit->add_option("--label-col", rc.label_col, "Column holding ground-truth labels");
  fit->add_flag("--header", rc.header, "Skip the first row");
  fit->add_option("--trace-out", rc.trace_out, "Write the merge trace CSV here");

  GenConfig gc;
  auto* gen = app.add_subcommand("gen", "Write a labelled synthetic dataset");
  gen->add_option("--shape", gc.shape, "moons|circles|blobs|spiral")->capture_default_str();
  gen->add_option("--n", gc.n, "Number of points")->capture_default_str();
  gen->add_option("--jitter", gc.jitter, "Gaussian jitter (moons, circles, spiral)")->capture_default_str();
  gen->add_option("--factor", gc.factor, "Inner radius ratio (circles)")->capture_default_str();
  gen->add_option("--turns", gc.turns, "Turns per arm (spiral)")->capture_default_str();
  gen->add_option("--centers", gc.centers, "Blob count (blobs)")->capture_default_str();
  gen->add_option("--dim", gc.dim, "Dimension (blobs)")->capture_default_str();
  gen->add_option("--cluster-std", gc.cluster_std, "Blob standard deviation")->capture_default_str();
  gen->add_option("--noise", gc.noise, "Fraction of uniform noise points to append")->capture_default_str();
  gen->add_option("--seed", gc.seed, "Random seed")->capture_default_str();
  gen->add_option("--output", gc.output, "Output CSV")->required();

  EvalConfig ec;
  auto* eval = app.add_subcommand("eval", "Print ACC and NMI of predicted against true labels");
  eval->add_option("--pred", ec.pred, "Predicted label file")->required();
  eval->add_option("--truth", ec.truth, "Ground-truth file")->required();
  eval->add_option("--pred-col", ec.pred_col, "Label column in the prediction file")->capture_default_str();
  eval->add_option("--truth-col,--label-col", ec.truth_col, "Label column in the truth file")->capture_default_str();
  eval->add_flag("--header", ec.header, "Truth file has a header row");
  eval->add_option("--nmi-mean", ec.mean, "geometric|arithmetic")->capture_default_str();

  PlotConfig pc;
  auto* plot = app.add_subcommand("plot", "Write a 2-D scatter SVG");
  plot->add_option("--input", pc.input, "Input CSV")->required();
  plot->add_option("--output", pc.output, "Output SVG")->required();
  plot->add_option("--labels", pc.labels, "Label file used for colours");
  plot->add_option("--label-col", pc.label_col, "Column holding labels in the input");
  plot->add_option("--dims", pc.dims, "Two feature indices, e.g. 0,2");
  plot->add_flag("--header", pc.header, "Skip the first row");
  plot->add_flag("--balls", pc.balls, "Overlay granular-ball outlines");
  plot->add_option("--threshold", pc.threshold, "Consistency threshold for --balls")->capture_default_str();
  plot->add_option("--split-policy", pc.split_policy, "Split policy for --balls")->capture_default_str();
  plot->add_option("--seed", pc.seed, "Random seed for --balls")->capture_default_str();

  BenchConfig bc;
  auto* bench = app.add_subcommand("bench", "Time fit over a size ladder (CSV on stdout)");
  bench->add_option("--sizes", bc.sizes, "Dataset sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", bc.repeats, "Runs per size (median reported)")->capture_default_str();
  bench->add_option("--seed", bc.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*fit) return cmd_fit(rc);
    if (*gen) return cmd_gen(gc);
    if (*eval) return cmd_eval(ec);
    if (*plot) return cmd_plot(pc);
    if (*bench) return cmd_bench(bc);
  } catch (const gbct::DegenerateInput& e) {
    std::cerr << "gbct: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gbct: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
