#include "gaugeopt/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "gaugeopt/errors.hpp"
#include "gaugeopt/learners.hpp"

namespace gaugeopt {

namespace {

using nlohmann::json;

const char* const kBodyNames[] = {"l2_ball",       "lp_ball",  "simplex",  "trace_ball", "op_ball",
                                  "birkhoff",      "rotation_hull", "psd_trace", "psd_diag"};
const char* const kBaseAlgorithms[] = {"ftrl_proximal", "freegrad", "wrapper+ftrl",
                                       "wrapper+strongly_convex", "wrapper+smooth_stochastic"};
const char* const kLossTypes[] = {"adversarial_linear", "strongly_convex_quadratic",
                                  "smooth_stochastic"};

template <std::size_t N>
bool one_of(const std::string& s, const char* const (&names)[N]) {
  for (const char* n : names)
    if (s == n) return true;
  return false;
}

bool is_matrix_body(const std::string& name) {
  return name != "l2_ball" && name != "lp_ball" && name != "simplex";
}

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

double get_real(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<Vec> get_vec(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(std::string("config: '") + key + "' must be an array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(std::string("config: '") + key + "' must hold numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  if (!out.allFinite()) throw ConfigError(std::string("config: '") + key + "' must be finite");
  return out;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

BodySpec parse_body(const json& j) {
  BodySpec b;
  if (j.is_string()) {
    b.name = j.get<std::string>();
  } else if (j.is_object()) {
    check_keys(j, {"name", "dim", "n", "m", "p"}, "body");
    b.name = get<std::string>(j, "name", "");
    b.dim = get<int>(j, "dim", b.dim);
    b.n = get<int>(j, "n", j.contains("dim") ? b.dim : b.n);
    b.m = get<int>(j, "m", 0);
    b.p = get_real(j, "p", b.p);
  } else {
    throw ConfigError("config: 'body' must be a name or an object");
  }
  if (!one_of(b.name, kBodyNames)) throw ConfigError("config: unknown body '" + b.name + "'");
  if (b.dim < 1 || b.n < 1 || b.m < 0) throw ConfigError("config: body dimensions must be positive");
  if (!(b.p >= 1.0)) throw ConfigError("config: lp_ball needs p >= 1");
  return b;
}

AlgorithmSpec parse_algorithm(const json& j) {
  AlgorithmSpec a;
  if (j.is_string()) {
    a.name = j.get<std::string>();
  } else if (j.is_object()) {
    check_keys(j, {"name", "lo_variant", "lo_block", "delta", "schedule", "epsilon", "R", "lambda_init"},
               "algorithm");
    a.name = get<std::string>(j, "name", a.name);
    const std::string variant = get<std::string>(j, "lo_variant", "one_dim");
    if (variant == "one_dim") {
      a.lo_variant = LOVariant::one_dim;
    } else if (variant == "full") {
      a.lo_variant = LOVariant::full;
    } else {
      throw ConfigError("config: lo_variant must be 'full' or 'one_dim'");
    }
    a.lo_block = get<int>(j, "lo_block", 0);
    a.delta = get_real(j, "delta", a.delta);
    a.schedule = get<std::string>(j, "schedule", a.schedule);
    a.epsilon = get_real(j, "epsilon", a.epsilon);
    a.radius = get_real(j, "R", a.radius);
    a.lambda_init = get_real(j, "lambda_init", a.lambda_init);
  } else {
    throw ConfigError("config: 'algorithm' must be a name or an object");
  }
  a.base = a.name;
  const std::string prefix = "restart(";
  if (a.name.rfind(prefix, 0) == 0) {
    if (a.name.back() != ')') throw ConfigError("config: malformed restart(...) algorithm name");
    a.restart = true;
    a.base = a.name.substr(prefix.size(), a.name.size() - prefix.size() - 1);
  }
  if (!one_of(a.base, kBaseAlgorithms)) throw ConfigError("config: unknown algorithm '" + a.name + "'");
  if (!(a.delta > 0.0 && a.delta < 1.0 / 3.0)) throw ConfigError("config: delta must lie in (0, 1/3)");
  try {
    ToleranceSchedule::parse(a.schedule, a.delta);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(a.epsilon > 0.0) || !std::isfinite(a.epsilon)) throw ConfigError("config: epsilon must be positive");
  if (!(a.radius >= 0.0) || !std::isfinite(a.radius)) throw ConfigError("config: R must be nonnegative");
  if (!(a.lambda_init >= 0.0) || !std::isfinite(a.lambda_init))
    throw ConfigError("config: lambda_init must be nonnegative");
  if (a.lo_block < 0) throw ConfigError("config: lo_block must be positive");
  return a;
}

LossSpec parse_loss(const json& j) {
  LossSpec l;
  if (j.is_string()) {
    l.type = j.get<std::string>();
  } else if (j.is_object()) {
    check_keys(j, {"type", "mode", "B", "mu", "b_scale", "beta", "sigma", "x_star", "comparator"}, "loss");
    l.type = get<std::string>(j, "type", l.type);
    l.mode = get<std::string>(j, "mode", l.mode);
    l.B = get_real(j, "B", l.B);
    l.mu = get_real(j, "mu", l.mu);
    l.b_scale = get_real(j, "b_scale", l.b_scale);
    l.beta = get_real(j, "beta", l.beta);
    l.sigma = get_real(j, "sigma", l.sigma);
    l.x_star = get_vec(j, "x_star");
    l.comparator = get_vec(j, "comparator");
  } else {
    throw ConfigError("config: 'loss' must be a name or an object");
  }
  if (!one_of(l.type, kLossTypes)) throw ConfigError("config: unknown loss type '" + l.type + "'");
  if (l.mode != "adaptive" && l.mode != "iid") throw ConfigError("config: loss mode must be 'adaptive' or 'iid'");
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!positive(l.B)) throw ConfigError("config: B must be positive");
  if (!positive(l.mu)) throw ConfigError("config: mu must be positive");
  if (!positive(l.beta)) throw ConfigError("config: beta must be positive");
  if (!nonneg(l.b_scale)) throw ConfigError("config: b_scale must be nonnegative");
  if (!nonneg(l.sigma)) throw ConfigError("config: sigma must be nonnegative");
  return l;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(j, {"body", "algorithm", "loss", "horizon", "seed", "output", "check_feasibility", "mesh_size"},
             "config");
  for (const char* key : {"body", "algorithm", "loss", "horizon", "seed"})
    if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");

  ExperimentConfig cfg;
  cfg.body = parse_body(j.at("body"));
  cfg.algorithm = parse_algorithm(j.at("algorithm"));
  cfg.loss = parse_loss(j.at("loss"));
  if (!j.at("horizon").is_number_integer()) throw ConfigError("config: horizon must be an integer");
  cfg.horizon = j.at("horizon").get<std::int64_t>();
  if (cfg.horizon < 0) throw ConfigError("config: horizon must be nonnegative");
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
    throw ConfigError("config: seed must be a nonnegative integer");
  if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0)
    throw ConfigError("config: seed must be a nonnegative integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.output = get<std::string>(j, "output", "");
  cfg.check_feasibility = get<bool>(j, "check_feasibility", true);
  cfg.mesh_size = get<int>(j, "mesh_size", 0);
  if (cfg.mesh_size < 0) throw ConfigError("config: mesh_size must be nonnegative");

  const ConvexBody body = make_body(cfg.body);
  if (cfg.algorithm.lo_block != 0) {
    try {
      cfg.algorithm.lo_variant = lo_variant_for_block(cfg.algorithm.lo_block, body.dim());
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  for (const auto* v : {&cfg.loss.x_star, &cfg.loss.comparator})
    if (*v && (*v)->size() != body.dim())
      throw ConfigError("config: vector length does not match body dimension " + std::to_string(body.dim()));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  json body{{"name", cfg.body.name}};
  if (is_matrix_body(cfg.body.name)) {
    body["n"] = cfg.body.n;
    if (cfg.body.m != 0) body["m"] = cfg.body.m;
  } else {
    body["dim"] = cfg.body.dim;
  }
  if (cfg.body.name == "lp_ball") {
    if (std::isinf(cfg.body.p)) body["p"] = "inf"; else body["p"] = cfg.body.p;
  }
  j["body"] = body;

  const AlgorithmSpec& a = cfg.algorithm;
  json alg{{"name", a.name},
           {"lo_variant", a.lo_variant == LOVariant::full ? "full" : "one_dim"},
           {"delta", a.delta},
           {"schedule", a.schedule},
           {"epsilon", a.epsilon},
           {"R", a.radius},
           {"lambda_init", a.lambda_init}};
  if (a.lo_block != 0) alg["lo_block"] = a.lo_block;
  j["algorithm"] = alg;

  const LossSpec& l = cfg.loss;
  json loss{{"type", l.type}, {"mode", l.mode}, {"B", l.B},        {"mu", l.mu},
            {"b_scale", l.b_scale}, {"beta", l.beta}, {"sigma", l.sigma}};
  if (l.x_star) loss["x_star"] = vec_json(*l.x_star);
  if (l.comparator) loss["comparator"] = vec_json(*l.comparator);
  j["loss"] = loss;

  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  if (!cfg.output.empty()) j["output"] = cfg.output;
  j["check_feasibility"] = cfg.check_feasibility;
  j["mesh_size"] = cfg.mesh_size;
  return j.dump(2);
}

ConvexBody make_body(const BodySpec& spec) {
  try {
    const int m = spec.m != 0 ? spec.m : spec.n;
    if (spec.name == "l2_ball") return make_l2_ball(spec.dim);
    if (spec.name == "lp_ball") return make_lp_ball(spec.dim, spec.p);
    if (spec.name == "simplex") return make_simplex_body(spec.dim).body;
    if (spec.name == "trace_ball") return make_trace_norm_ball(m, spec.n);
    if (spec.name == "op_ball") return make_op_norm_ball(m, spec.n);
    if (spec.name == "birkhoff") return make_birkhoff_body(spec.n).body;
    if (spec.name == "rotation_hull") return make_rotation_hull_body(spec.n);
    if (spec.name == "psd_trace") return make_psd_unit_trace_body(spec.n).body;
    if (spec.name == "psd_diag") return make_psd_bounded_diag_body(spec.n).body;
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown body '" + spec.name + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

std::unique_ptr<OnlineAlgorithm> make_base(const AlgorithmSpec& spec, const ConvexBody& body,
                                           std::uint64_t seed, double epsilon) {
  const ToleranceSchedule schedule = ToleranceSchedule::parse(spec.schedule, spec.delta);
  const ConvexBody sized =
      spec.radius > body.outer_radius() ? with_outer_radius(body, spec.radius) : body;
  if (spec.base == "ftrl_proximal") {
    const double R = spec.radius > 0.0 ? spec.radius : body.inner_radius();
    return std::make_unique<LearnerAlgorithm>(std::make_unique<FtrlProximal>(body.dim(), R));
  }
  if (spec.base == "freegrad") {
    const double R = spec.radius > 0.0 ? spec.radius : body.inner_radius();
    return std::make_unique<LearnerAlgorithm>(std::make_unique<FreeGrad>(body.dim(), R, epsilon));
  }
  if (spec.base == "wrapper+ftrl") return make_wrapper_ftrl(sized, schedule, spec.lo_variant, seed);
  if (spec.base == "wrapper+strongly_convex")
    return make_wrapper_strongly_convex(sized, schedule, spec.lo_variant, seed, epsilon);
  if (spec.base == "wrapper+smooth_stochastic")
    return make_wrapper_smooth_stochastic(sized, schedule, spec.lo_variant, seed, epsilon,
                                          spec.lambda_init);
  throw ConfigError("config: unknown algorithm '" + spec.base + "'");
}

}  // namespace

std::unique_ptr<OnlineAlgorithm> make_algorithm(const AlgorithmSpec& spec, const ConvexBody& body,
                                                std::uint64_t seed) {
  if (spec.radius > 0.0 && spec.radius < body.outer_radius() && spec.base.rfind("wrapper", 0) == 0)
    throw ConfigError("config: R below the body's outer radius");
  if (!spec.restart) return make_base(spec, body, seed, spec.epsilon);
  auto factory = [spec, body, seed](double epsilon, int epoch) {
    return make_base(spec, body, derive_seed(seed, static_cast<std::uint64_t>(epoch)), epsilon);
  };
  return std::make_unique<Restart>(body.dim(), factory);
}

}  // namespace gaugeopt
