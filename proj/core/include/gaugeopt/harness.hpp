#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/config.hpp"
#include "gaugeopt/gauge.hpp"
#include "gaugeopt/reductions.hpp"
#include "gaugeopt/types.hpp"

namespace gaugeopt {

struct TraceRow {
  std::int64_t t = 0;
  double loss = 0.0;
  double regret = 0.0;
  double suboptimality = 0.0;
  std::uint64_t oracle_calls_cum = 0;
  double gamma_t = 0.0;
  double norm_g = 0.0;
  double norm_gtilde = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TraceRow> rows;
  std::vector<Vec> played;
  std::vector<double> deltas;
  std::uint64_t oracle_calls = 0;           // from the counting wrapper
  std::uint64_t oracle_calls_reported = 0;  // summed from the algorithm's own tallies
  std::uint64_t oracle_budget = 0;          // sum of nominal per-round budgets (0 if n/a)
  std::int64_t feasibility_violations = 0;
  bool feasibility_checked = false;
  std::string comparator_kind;
  Vec comparator;
  std::optional<double> regret_slope;
  std::optional<double> suboptimality_slope;
  std::optional<double> oracle_call_bound;  // C0 T ln(d T kappa / delta) for wrapper runs
  double kappa = 1.0;
  double wall_seconds = 0.0;
};

// Raised by run_experiment when a round fails; setup problems raise ConfigError instead.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(std::int64_t round, const std::string& what)
      : std::runtime_error(what), round_(round) {}
  std::int64_t round() const { return round_; }

 private:
  std::int64_t round_;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_trace_csv(const ExperimentResult& result, const std::string& path);
std::string summary_json(const ExperimentResult& result);
void write_outputs(const ExperimentResult& result, const std::string& dir);

// 1 / sup{nu : nu w in C} by bracketing and bisection on membership, to absolute
// accuracy tol in the gauge value.
double brute_force_gauge(const ConvexBody& body, const Vec& w, double tol = 1e-9);

// Least-squares slope of log(value) against log(t) over the final fraction of the series.
double fit_rate_slope(const std::vector<double>& t, const std::vector<double>& value,
                      double window = 0.5);

// Boundary points of C along evenly spread directions (d <= 3), plus the origin.
std::vector<Vec> comparator_mesh(const ConvexBody& body, int directions);

// Closed-form constant with per-round one_dim budget <= C0 ln(d T kappa / delta)
// under delta_t = delta / t^2.
double oracle_budget_constant(double delta);

}  // namespace gaugeopt
