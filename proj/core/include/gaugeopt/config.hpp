#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/gauge.hpp"
#include "gaugeopt/reductions.hpp"
#include "gaugeopt/types.hpp"

namespace gaugeopt {

struct BodySpec {
  std::string name = "l2_ball";
  int dim = 2;  // ball and simplex dimension
  int m = 0;    // matrix rows (trace_ball, op_ball); defaults to n
  int n = 2;    // matrix size
  double p = 2.0;
};

struct AlgorithmSpec {
  std::string name = "wrapper+ftrl";  // as written in the config
  std::string base = "wrapper+ftrl";  // name with any restart(...) stripped
  bool restart = false;
  LOVariant lo_variant = LOVariant::one_dim;
  int lo_block = 0;  // 0 = unset; otherwise 1 or d, mapped onto lo_variant
  double delta = 0.1;
  std::string schedule = "quad";
  double epsilon = 1.0;
  double radius = 0.0;  // 0 means the body's outer radius
  double lambda_init = 1.0;
};

struct LossSpec {
  std::string type = "adversarial_linear";  // | strongly_convex_quadratic | smooth_stochastic
  std::string mode = "adaptive";            // adversarial_linear: adaptive | iid
  double B = 1.0;
  double mu = 1.0;
  double b_scale = 0.5;
  double beta = 1.0;
  double sigma = 0.0;
  std::optional<Vec> x_star;
  std::optional<Vec> comparator;
};

struct ExperimentConfig {
  BodySpec body;
  AlgorithmSpec algorithm;
  LossSpec loss;
  std::int64_t horizon = 1000;
  std::uint64_t seed = 1;
  std::string output;
  bool check_feasibility = true;
  int mesh_size = 0;  // comparator mesh directions for d <= 3; 0 picks a default
};

// Throws ConfigError on malformed or out-of-range input.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

ConvexBody make_body(const BodySpec& spec);

// Independent 64-bit seed for sub-stream `tag` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

// Builds the algorithm the config describes over the given (possibly counted) body.
std::unique_ptr<OnlineAlgorithm> make_algorithm(const AlgorithmSpec& spec, const ConvexBody& body,
                                                std::uint64_t seed);

}  // namespace gaugeopt
