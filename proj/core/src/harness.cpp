#include "gaugeopt/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "gaugeopt/errors.hpp"
#include "gaugeopt/learners.hpp"
#include "gaugeopt/streams.hpp"

namespace gaugeopt {

namespace {

constexpr std::uint64_t kStreamTag = 1;
constexpr std::uint64_t kAlgorithmTag = 2;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double gauge_of(const ConvexBody& body, const Vec& w) {
  if (w.isZero(0.0)) return 0.0;
  return body.has_analytic_gauge() ? body.analytic_gauge(w) : brute_force_gauge(body, w);
}

int default_mesh_size(int d) {
  if (d == 1) return 2;
  if (d == 2) return 256;
  return 1024;
}

// Linear-plus-quadratic loss model shared by every stream:
//   l_t(u) = q(u) + <c_t, u>,  q(u) = (curv/2) |u - center|^2.
struct LossModel {
  double curv = 0.0;
  Vec center;

  double q(const Vec& u) const { return curv == 0.0 ? 0.0 : 0.5 * curv * (u - center).squaredNorm(); }
  Vec linear_part(const Vec& x, const Vec& g) const {
    return curv == 0.0 ? g : Vec(g - curv * (x - center));
  }
};

}  // namespace

double brute_force_gauge(const ConvexBody& body, const Vec& w, double tol) {
  if (w.size() != body.dim()) throw PreconditionError("brute_force_gauge: dimension mismatch");
  if (w.isZero(0.0)) throw PreconditionError("brute_force_gauge: w must be nonzero");
  if (!(tol > 0.0)) throw PreconditionError("brute_force_gauge: tol must be positive");
  const double n = w.norm();
  const double probe = tol * body.inner_radius();
  double lo = body.inner_radius() / n;
  double hi = 2.0 * (body.outer_radius() + probe) / n;
  for (int i = 0; i < 64 && body.membership(hi * w, probe); ++i) hi *= 2.0;
  if (body.membership(hi * w, probe)) throw OracleFailure("brute_force_gauge: body looks unbounded");
  if (!body.membership(lo * w, probe)) lo = 0.0;
  for (int i = 0; i < 400 && (lo == 0.0 || 1.0 / lo - 1.0 / hi > tol); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (body.membership(mid * w, probe)) lo = mid; else hi = mid;
  }
  if (lo == 0.0) throw OracleFailure("brute_force_gauge: no interior point on the ray");
  return 0.5 * (1.0 / lo + 1.0 / hi);
}

double fit_rate_slope(const std::vector<double>& t, const std::vector<double>& value,
                      double window) {
  if (t.size() != value.size()) throw PreconditionError("fit_rate_slope: length mismatch");
  if (!(window > 0.0 && window <= 1.0)) throw PreconditionError("fit_rate_slope: window must lie in (0, 1]");
  const std::size_t n = t.size();
  const auto skip = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - window)));
  if (n < skip + 2) throw PreconditionError("fit_rate_slope: need at least two points in the window");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(n - skip);
  for (std::size_t i = skip; i < n; ++i) {
    if (!(t[i] > 0.0) || !(value[i] > 0.0))
      throw PreconditionError("fit_rate_slope: values must be positive over the window");
    const double x = std::log(t[i]);
    const double y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw PreconditionError("fit_rate_slope: t values must not all coincide");
  return (m * sxy - sx * sy) / den;
}

std::vector<Vec> comparator_mesh(const ConvexBody& body, int directions) {
  const int d = body.dim();
  if (d > 3) throw PreconditionError("comparator_mesh: only available for d <= 3");
  if (directions < 2) throw PreconditionError("comparator_mesh: need at least two directions");
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (d == 2) {
    for (int k = 0; k < directions; ++k) {
      const double a = 2.0 * std::numbers::pi * k / directions;
      dirs.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < directions; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / directions;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * k;
      dirs.push_back((Vec(3) << rho * std::cos(a), rho * std::sin(a), z).finished());
    }
  }
  std::vector<Vec> mesh;
  mesh.reserve(dirs.size() + 1);
  for (const Vec& u : dirs) mesh.push_back(u / brute_force_gauge(body, u));
  mesh.push_back(Vec::Zero(d));
  return mesh;
}

double oracle_budget_constant(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("oracle_budget_constant: delta must lie in (0, 1)");
  return 14.0 / std::numbers::ln2 + 38.0 / std::log(1.0 / delta);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.config = cfg;

  const ConvexBody raw = make_body(cfg.body);
  const ConvexBody counted = oracle_call_counter(raw);
  const int d = raw.dim();
  res.kappa = raw.kappa();
  const LossSpec& ls = cfg.loss;

  auto in_body = [&](const Vec& x, bool strict) {
    if (x.isZero(0.0)) return true;
    const double g = gauge_of(raw, x);
    return strict ? g < 1.0 : g <= 1.0 + 1e-12;
  };
  const Vec x_star = ls.x_star.value_or(Vec::Zero(d));
  if (x_star.size() != d) throw ConfigError("run: x_star has the wrong dimension");
  if (ls.comparator && ls.comparator->size() != d) throw ConfigError("run: comparator has the wrong dimension");

  const std::uint64_t stream_seed = derive_seed(cfg.seed, kStreamTag);
  std::unique_ptr<LossStream> stream;
  LossModel model;
  try {
    if (ls.type == "adversarial_linear") {
      stream = std::make_unique<AdversarialLinearStream>(
          stream_seed, d, ls.B,
          ls.mode == "iid" ? AdversarialLinearStream::Mode::iid : AdversarialLinearStream::Mode::adaptive);
    } else if (ls.type == "strongly_convex_quadratic") {
      if (!in_body(x_star, false)) throw ConfigError("run: x_star lies outside the body");
      stream = std::make_unique<StronglyConvexStream>(stream_seed, ls.mu, x_star, ls.b_scale);
      model.curv = ls.mu;
    } else {
      if (!in_body(x_star, true)) throw ConfigError("run: x_star must lie strictly inside the body");
      stream = std::make_unique<SmoothStochasticStream>(stream_seed, ls.beta, ls.sigma, x_star);
      model.curv = ls.beta;
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("run: ") + e.what());
  }
  model.center = x_star;

  std::unique_ptr<OnlineAlgorithm> alg;
  try {
    alg = make_algorithm(cfg.algorithm, counted, derive_seed(cfg.seed, kAlgorithmTag));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("run: ") + e.what());
  }
  const auto* wrapper = dynamic_cast<const Wrapper*>(alg.get());
  const ToleranceSchedule schedule = ToleranceSchedule::parse(cfg.algorithm.schedule, cfg.algorithm.delta);

  const std::int64_t T = cfg.horizon;
  res.rows.reserve(static_cast<std::size_t>(T));
  res.played.reserve(static_cast<std::size_t>(T));
  res.deltas.reserve(static_cast<std::size_t>(T));
  std::vector<Vec> csum;  // running sum of the linear parts c_s
  csum.reserve(static_cast<std::size_t>(T));
  std::vector<double> cum_loss;
  cum_loss.reserve(static_cast<std::size_t>(T));
  Vec c_acc = Vec::Zero(d);
  double l_acc = 0.0;
  res.feasibility_checked = cfg.check_feasibility;

  for (std::int64_t t = 1; t <= T; ++t) {
    TraceRow row;
    row.t = t;
    try {
      stream->begin_round(t);
      const Vec x = alg->predict();
      const Vec g = stream->gradient(x);
      row.loss = stream->loss(x);
      alg->update(g);
      const RoundInfo& info = alg->info();
      res.oracle_calls_reported += info.oracle_calls;
      const double delta_t = info.delta > 0.0 ? info.delta : schedule.at(t);
      if (cfg.check_feasibility && !raw.membership(x, 3.0 * delta_t)) ++res.feasibility_violations;
      if (wrapper)
        res.oracle_budget += wrapper_round_budget(wrapper->body(), info.delta, cfg.algorithm.lo_variant);
      row.oracle_calls_cum = counted.oracle_calls();
      row.gamma_t = info.gamma;
      row.norm_g = g.norm();
      row.norm_gtilde = info.gtilde.size() == g.size() ? info.gtilde.norm() : row.norm_g;
      l_acc += row.loss;
      c_acc += model.linear_part(x, g);
      res.played.push_back(x);
      res.deltas.push_back(delta_t);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw RunFailure(t, "round " + std::to_string(t) + ": " + e.what());
    }
    if (!std::isfinite(row.loss) || !std::isfinite(row.gamma_t) || !std::isfinite(row.norm_g) ||
        !std::isfinite(row.norm_gtilde))
      throw RunFailure(t, "round " + std::to_string(t) + ": non-finite value in round output");
    cum_loss.push_back(l_acc);
    csum.push_back(c_acc);
    res.rows.push_back(row);
  }
  res.oracle_calls = counted.oracle_calls();

  // Comparator and regret trace.
  const bool exact_best = ls.type == "strongly_convex_quadratic" && raw.name() == "l2_ball" && !ls.comparator;
  std::vector<Vec> mesh;
  Vec u = Vec::Zero(d);
  if (ls.comparator) {
    res.comparator_kind = "declared";
    u = *ls.comparator;
  } else if (exact_best) {
    res.comparator_kind = "best_in_hindsight";
  } else if (ls.type != "adversarial_linear") {
    res.comparator_kind = "x_star";
    u = x_star;
  } else if (d <= 3) {
    res.comparator_kind = "mesh";
    if (T > 0) mesh = comparator_mesh(raw, cfg.mesh_size > 0 ? cfg.mesh_size : default_mesh_size(d));
  } else {
    res.comparator_kind = "projected_gradient_sum";
    if (T > 0 && !csum.back().isZero(0.0)) {
      const Vec target = -raw.outer_radius() * csum.back().normalized();
      u = gauge_project(target, gauge_of(raw, target));
    }
  }

  for (std::int64_t t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const Vec& C = csum[i];
    const double tt = static_cast<double>(t);
    double best;
    if (res.comparator_kind == "mesh") {
      best = std::numeric_limits<double>::infinity();
      for (const Vec& v : mesh) {
        const double val = C.dot(v);
        if (val < best) {
          best = val;
          u = v;
        }
      }
    } else if (exact_best) {
      u = ball_project(x_star - C / (tt * model.curv), 1.0);
      best = tt * model.q(u) + C.dot(u);
    } else {
      best = tt * model.q(u) + C.dot(u);
    }
    TraceRow& row = res.rows[i];
    row.regret = cum_loss[i] - best;
    row.suboptimality = ls.type == "smooth_stochastic" ? model.q(res.played[i]) : row.regret / tt;
    if (!std::isfinite(row.regret) || !std::isfinite(row.suboptimality))
      throw RunFailure(t, "round " + std::to_string(t) + ": non-finite regret");
  }
  res.comparator = u;

  if (T >= 4) {
    std::vector<double> ts, reg, sub;
    for (const TraceRow& r : res.rows) {
      ts.push_back(static_cast<double>(r.t));
      reg.push_back(r.regret);
      sub.push_back(r.suboptimality);
    }
    try {
      res.regret_slope = fit_rate_slope(ts, reg);
    } catch (const PreconditionError&) {
    }
    try {
      res.suboptimality_slope = fit_rate_slope(ts, sub);
    } catch (const PreconditionError&) {
    }
  }
  if (wrapper && T > 0 && schedule.kind == ToleranceSchedule::Kind::quad &&
      cfg.algorithm.lo_variant == LOVariant::one_dim) {
    const double kappa = wrapper->body().kappa();
    res.oracle_call_bound = oracle_budget_constant(schedule.delta) * static_cast<double>(T) *
                            std::log(d * static_cast<double>(T) * kappa / schedule.delta);
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

void write_trace_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,loss,regret,suboptimality,oracle_calls_cum,gamma_t,norm_g,norm_gtilde\n";
  for (const TraceRow& r : result.rows) {
    out << r.t << ',' << fmt(r.loss) << ',' << fmt(r.regret) << ',' << fmt(r.suboptimality) << ','
        << r.oracle_calls_cum << ',' << fmt(r.gamma_t) << ',' << fmt(r.norm_g) << ','
        << fmt(r.norm_gtilde) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string summary_json(const ExperimentResult& result) {
  using nlohmann::ordered_json;
  ordered_json j;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  const bool any = !result.rows.empty();
  j["horizon"] = result.config.horizon;
  j["seed"] = result.config.seed;
  j["body"] = result.config.body.name;
  j["algorithm"] = result.config.algorithm.name;
  j["loss"] = result.config.loss.type;
  j["kappa"] = result.kappa;
  j["final_regret"] = any ? ordered_json(result.rows.back().regret) : ordered_json(0.0);
  j["final_suboptimality"] = any ? ordered_json(result.rows.back().suboptimality) : ordered_json(0.0);
  j["regret_slope"] = opt(result.regret_slope);
  j["suboptimality_slope"] = opt(result.suboptimality_slope);
  j["oracle_calls"] = result.oracle_calls;
  j["oracle_calls_reported"] = result.oracle_calls_reported;
  j["oracle_budget"] = result.oracle_budget;
  j["oracle_call_bound"] = opt(result.oracle_call_bound);
  j["feasibility_checked"] = result.feasibility_checked;
  j["feasibility_violations"] = result.feasibility_violations;
  j["comparator_kind"] = result.comparator_kind;
  ordered_json comp = ordered_json::array();
  for (Eigen::Index i = 0; i < result.comparator.size(); ++i) comp.push_back(result.comparator(i));
  j["comparator"] = comp;
  j["wall_seconds"] = result.wall_seconds;
  j["config"] = nlohmann::ordered_json::parse(config_to_json(result.config));
  return j.dump(2);
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_trace_csv(result, (base / "trace.csv").string());
  std::ofstream out(base / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json in " + dir);
  out << summary_json(result) << '\n';
}

}  // namespace gaugeopt
