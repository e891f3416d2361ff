#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "gaugeopt/errors.hpp"
#include "gaugeopt/gauge.hpp"
#include "gaugeopt/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct BodyArgs {
  std::string name = "l2_ball";
  int dim = 2;
  int n = 0;
  int m = 0;
  double p = 2.0;

  gaugeopt::BodySpec spec() const {
    gaugeopt::BodySpec s;
    s.name = name;
    s.dim = dim;
    s.n = n > 0 ? n : dim;
    s.m = m;
    s.p = p;
    return s;
  }
};

void add_body_options(CLI::App* cmd, BodyArgs& b) {
  cmd->add_option("--body", b.name, "Body name")->required();
  cmd->add_option("--dim", b.dim, "Dimension (balls, simplex) or matrix size");
  cmd->add_option("--n", b.n, "Matrix size for matrix bodies");
  cmd->add_option("--m", b.m, "Row count for trace_ball/op_ball");
  cmd->add_option("--p", b.p, "Exponent for lp_ball");
}

int run_cmd(const std::string& config_path, const std::string& out_dir, const std::int64_t* seed) {
  gaugeopt::ExperimentConfig cfg = gaugeopt::load_config(config_path);
  if (seed) {
    if (*seed < 0) throw gaugeopt::ConfigError("--seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*seed);
  }
  const std::string dir = !out_dir.empty() ? out_dir : (!cfg.output.empty() ? cfg.output : "out");
  const gaugeopt::ExperimentResult res = gaugeopt::run_experiment(cfg);
  gaugeopt::write_outputs(res, dir);
  const double regret = res.rows.empty() ? 0.0 : res.rows.back().regret;
  std::printf("rounds=%lld regret=%.6g oracle_calls=%llu feasibility_violations=%lld out=%s\n",
              static_cast<long long>(cfg.horizon), regret,
              static_cast<unsigned long long>(res.oracle_calls),
              static_cast<long long>(res.feasibility_violations), dir.c_str());
  return kExitOk;
}

int diag_gauge(const BodyArgs& args, double delta, int samples, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw gaugeopt::ConfigError("--delta must lie in (0, 1)");
  if (samples < 1) throw gaugeopt::ConfigError("--samples must be positive");
  const gaugeopt::ConvexBody body = gaugeopt::make_body(args.spec());
  const std::uint64_t budget = gaugeopt::gauge_call_budget(body.kappa(), delta);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::printf("body=%s dim=%d r=%.6g R=%.6g kappa=%.6g delta=%g budget=%llu\n", body.name().c_str(),
              body.dim(), body.inner_radius(), body.outer_radius(), body.kappa(), delta,
              static_cast<unsigned long long>(budget));
  std::printf("%6s %14s %14s %12s %6s %4s\n", "i", "gamma_ref", "gamma_tilde", "excess", "calls", "ok");
  int failures = 0;
  for (int i = 0; i < samples; ++i) {
    gaugeopt::Vec u(body.dim());
    for (auto& v : u) v = normal(rng);
    // Keep ||w|| <= 6R/5, the oracle's input domain.
    const double gu = gaugeopt::brute_force_gauge(body, u);
    const double top = std::min(3.0, 1.2 * body.outer_radius() * gu / u.norm());
    const gaugeopt::Vec w = u * ((0.6 + (top - 0.6) * unit(rng)) / gu);
    const double ref = gaugeopt::brute_force_gauge(body, w);
    const gaugeopt::ConvexBody counted = gaugeopt::oracle_call_counter(body);
    const gaugeopt::GaugeEval ev = gaugeopt::gauge_approx(counted, w, delta);
    const double excess = ev.gamma_tilde - ref;
    // Conformance holds for gamma >= 9/16; below that the oracle may report zero.
    const bool in_scope = ref >= 9.0 / 16.0;
    const bool ok = (!in_scope || (excess >= -1e-9 && excess <= delta + 1e-9)) &&
                    counted.oracle_calls() <= budget;
    if (!ok) ++failures;
    std::printf("%6d %14.9f %14.9f %12.3e %6llu %4s\n", i, ref, ev.gamma_tilde, excess,
                static_cast<unsigned long long>(counted.oracle_calls()), ok ? "yes" : "NO");
  }
  std::printf("violations=%d of %d\n", failures, samples);
  return failures == 0 ? kExitOk : kExitNumerical;
}

int diag_oracle_count(const BodyArgs& args, double delta, std::int64_t horizon, const std::string& variant,
                      std::uint64_t seed) {
  gaugeopt::ExperimentConfig cfg;
  cfg.body = args.spec();
  cfg.algorithm.name = cfg.algorithm.base = "wrapper+ftrl";
  cfg.algorithm.delta = delta;
  if (variant == "full") {
    cfg.algorithm.lo_variant = gaugeopt::LOVariant::full;
  } else if (variant != "one_dim") {
    throw gaugeopt::ConfigError("--variant must be 'full' or 'one_dim'");
  }
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw gaugeopt::ConfigError("--delta must lie in (0, 1/3)");
  if (horizon < 1) throw gaugeopt::ConfigError("--horizon must be positive");
  cfg.horizon = horizon;
  cfg.seed = seed;
  cfg.check_feasibility = false;
  const gaugeopt::ExperimentResult res = gaugeopt::run_experiment(cfg);
  std::printf("body=%s rounds=%lld variant=%s\n", res.config.body.name.c_str(),
              static_cast<long long>(horizon), variant.c_str());
  std::printf("counted_calls=%llu reported_calls=%llu budget_sum=%llu\n",
              static_cast<unsigned long long>(res.oracle_calls),
              static_cast<unsigned long long>(res.oracle_calls_reported),
              static_cast<unsigned long long>(res.oracle_budget));
  if (res.oracle_call_bound) {
    std::printf("closed_form_bound=%.1f calls_per_round=%.3f\n", *res.oracle_call_bound,
                static_cast<double>(res.oracle_calls) / static_cast<double>(horizon));
  }
  const bool ok = res.oracle_calls == res.oracle_calls_reported && res.oracle_calls <= res.oracle_budget &&
                  (!res.oracle_call_bound || static_cast<double>(res.oracle_calls) <= *res.oracle_call_bound);
  std::printf("within_budget=%s\n", ok ? "yes" : "NO");
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-free online convex optimization via gauge projections"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::int64_t seed_override = 0;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("--config", config_path, "Path to the JSON config")->required();
  run->add_option("--out", out_dir, "Output directory for trace.csv and summary.json");
  auto* seed_opt = run->add_option("--seed", seed_override, "Override the config seed");

  auto* diag = app.add_subcommand("diag", "Diagnostics");
  diag->require_subcommand(1);

  BodyArgs gauge_body;
  double gauge_delta = 0.03;
  int samples = 20;
  std::uint64_t gauge_seed = 1;
  auto* gauge = diag->add_subcommand("gauge", "Gauge oracle conformance table");
  add_body_options(gauge, gauge_body);
  gauge->add_option("--delta", gauge_delta, "Gauge tolerance")->required();
  gauge->add_option("--samples", samples, "Number of random probes");
  gauge->add_option("--seed", gauge_seed, "Probe seed");

  BodyArgs count_body;
  double count_delta = 0.1;
  std::int64_t horizon = 1000;
  std::string variant = "one_dim";
  std::uint64_t count_seed = 1;
  auto* count = diag->add_subcommand("oracle-count", "Membership calls of wrapper+ftrl against the budget");
  add_body_options(count, count_body);
  count->add_option("--delta", count_delta, "Base tolerance of the quad schedule");
  count->add_option("--horizon", horizon, "Number of rounds");
  count->add_option("--variant", variant, "Polar LO variant: one_dim or full");
  count->add_option("--seed", count_seed, "Run seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return run_cmd(config_path, out_dir, seed_opt->count() ? &seed_override : nullptr);
    if (gauge->parsed()) return diag_gauge(gauge_body, gauge_delta, samples, gauge_seed);
    if (count->parsed()) return diag_oracle_count(count_body, count_delta, horizon, variant, count_seed);
  } catch (const gaugeopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gaugeopt::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gaugeopt::RunFailure& e) {
    std::cerr << "run failed at round " << e.round() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
