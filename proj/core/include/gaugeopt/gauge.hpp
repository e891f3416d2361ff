#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/types.hpp"

namespace gaugeopt {

using Rng = std::mt19937_64;

struct GaugeEval {
  double gamma_tilde = 0.0;
  double tolerance = 0.0;
  std::uint64_t oracle_calls = 0;
};

// ceil(log2((4 kappa)^2 / delta)) + 1
std::uint64_t gauge_call_budget(double kappa, double delta);

// Bisection gauge estimate. Requires ||w|| <= 6R/5 and 0 < delta < 1.
GaugeEval gauge_approx(const ConvexBody& body, const Vec& w, double delta);

enum class LOVariant { full, one_dim };

struct PolarLOResult {
  double gamma_tilde = 0.0;
  Vec s_tilde;
  LOVariant variant = LOVariant::full;
  std::optional<int> sampled_coordinate;
  std::uint64_t oracle_calls = 0;
};

// Smoothing radii and inner tolerance. The nominal values are floored so the
// finite differences stay above what double precision and the body's
// membership resolution can distinguish.
struct PolarLOParams {
  double eps_nominal = 0.0;
  double eps = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
};

PolarLOParams polar_lo_params(const ConvexBody& body, double delta);

// Nominal per-call membership budget of the oracle.
std::uint64_t polar_lo_call_budget(const ConvexBody& body, double delta, LOVariant variant);

// Both require ||w|| <= R and 0 < delta < 1/3; every draw comes from rng.
PolarLOResult polar_lo_full(const ConvexBody& body, const Vec& w, double delta, Rng& rng);
PolarLOResult polar_lo_1d(const ConvexBody& body, const Vec& w, double delta, Rng& rng);
PolarLOResult polar_lo(const ConvexBody& body, const Vec& w, double delta, Rng& rng,
                       LOVariant variant);

// Block variant: only k = 1 and k = d are supported.
LOVariant lo_variant_for_block(int k, int d);

double gauge_distance(double gamma_tilde);
Vec gauge_project(const Vec& w, double gamma_tilde);

}  // namespace gaugeopt
