#include "gaugeopt/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaugeopt/errors.hpp"

namespace gaugeopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_lo_inputs(const ConvexBody& body, const Vec& w, double delta) {
  if (w.size() != body.dim()) throw PreconditionError("polar_lo: dimension mismatch");
  if (!w.allFinite()) throw PreconditionError("polar_lo: non-finite point");
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) throw PreconditionError("polar_lo: delta must lie in (0, 1/3)");
  if (w.norm() > body.outer_radius() * (1.0 + 1e-12))
    throw PreconditionError("polar_lo: point lies outside B(R)");
}

struct Smoothing {
  Vec u;
  Vec z;
};

Smoothing draw_smoothing(const Vec& w, const PolarLOParams& p, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Smoothing s{w, w};
  for (Eigen::Index i = 0; i < w.size(); ++i) s.u(i) = w(i) + p.nu1 * unif(rng);
  for (Eigen::Index i = 0; i < w.size(); ++i) s.z(i) = s.u(i) + p.nu2 * unif(rng);
  return s;
}

// Difference quotient of the gauge along coordinate i across B_inf(u, nu2).
double coordinate_slope(const ConvexBody& body, const Smoothing& s, Eigen::Index i,
                        const PolarLOParams& p, std::uint64_t& calls) {
  Vec plus = s.z, minus = s.z;
  plus(i) = s.u(i) + p.nu2;
  minus(i) = s.u(i) - p.nu2;
  const GaugeEval hi = gauge_approx(body, plus, p.eps);
  const GaugeEval lo = gauge_approx(body, minus, p.eps);
  calls += hi.oracle_calls + lo.oracle_calls;
  return (hi.gamma_tilde - lo.gamma_tilde) / (2.0 * p.nu2);
}

}  // namespace

std::uint64_t gauge_call_budget(double kappa, double delta) {
  return static_cast<std::uint64_t>(std::ceil(std::log2(16.0 * kappa * kappa / delta))) + 1;
}

GaugeEval gauge_approx(const ConvexBody& body, const Vec& w, double delta) {
  if (w.size() != body.dim()) throw PreconditionError("gauge_approx: dimension mismatch");
  if (!w.allFinite()) throw PreconditionError("gauge_approx: non-finite point");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("gauge_approx: delta must lie in (0, 1)");
  const double R = body.outer_radius(), r = body.inner_radius(), kappa = body.kappa();
  const double norm = w.norm();
  if (norm > 1.2 * R * (1.0 + 1e-12)) throw PreconditionError("gauge_approx: ||w|| exceeds 6R/5");

  const double width = delta / (8.0 * kappa * kappa);
  const double eps = delta * r / (16.0 * kappa * kappa);
  GaugeEval out{0.0, delta, 0};
  if (norm <= r / 2.0) return out;
  ++out.oracle_calls;
  if (body.membership(2.0 * w, eps)) return out;

  // The step cap equals the width criterion in exact arithmetic; it only
  // guards against rounding in the threshold adding a step.
  const std::uint64_t max_steps = gauge_call_budget(kappa, delta) - 1;
  double alpha = 0.0, beta = 2.0;
  for (std::uint64_t k = 0; k < max_steps && beta - alpha > width; ++k) {
    const double mu = 0.5 * (alpha + beta);
    if (mu <= alpha || mu >= beta) break;
    ++out.oracle_calls;
    if (body.membership(mu * w, eps)) alpha = mu; else beta = mu;
  }
  const double denom = alpha - width;
  if (!(denom > 0.0)) {
    out.gamma_tilde = 16.0 * kappa * kappa / delta;
    throw DegenerateBisection("gauge_approx: non-positive bisection denominator");
  }
  out.gamma_tilde = 1.0 / denom;
  return out;
}

PolarLOParams polar_lo_params(const ConvexBody& body, double delta) {
  const double d = body.dim();
  const double r = body.inner_radius(), R = body.outer_radius(), kappa = body.kappa();
  PolarLOParams p;
  p.eps_nominal = r * r * std::pow(delta, 3) / (1e3 * std::pow(d, 3.5) * R * R);
  const double eps_floor =
      std::max(32.0 * kappa * kappa * kEps, 16.0 * kappa * kappa * body.resolution() / r);
  p.eps = std::max(p.eps_nominal, eps_floor);
  if (!(p.eps < 0.5))
    throw OracleFailure("polar_lo: kappa too large for the membership resolution in double precision");
  const double nu1 = r * delta / (10.0 * d);
  p.nu2 = std::max(std::sqrt(p.eps * nu1 * r / std::sqrt(d)), std::sqrt(eps_floor * r));
  p.nu1 = std::max(nu1, p.nu2);
  return p;
}

std::uint64_t polar_lo_call_budget(const ConvexBody& body, double delta, LOVariant variant) {
  const PolarLOParams p = polar_lo_params(body, delta);
  const std::uint64_t inner = gauge_call_budget(body.kappa(), p.eps_nominal);
  const std::uint64_t outer = gauge_call_budget(body.kappa(), delta);
  const std::uint64_t coords = variant == LOVariant::full ? static_cast<std::uint64_t>(body.dim()) : 1;
  return 2 * coords * inner + outer;
}

PolarLOResult polar_lo_full(const ConvexBody& body, const Vec& w, double delta, Rng& rng) {
  check_lo_inputs(body, w, delta);
  const PolarLOParams p = polar_lo_params(body, delta);
  const Smoothing s = draw_smoothing(w, p, rng);
  PolarLOResult out;
  out.variant = LOVariant::full;
  out.s_tilde.resize(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    out.s_tilde(i) = coordinate_slope(body, s, i, p, out.oracle_calls);
  const GaugeEval g = gauge_approx(body, w, delta);
  out.gamma_tilde = g.gamma_tilde;
  out.oracle_calls += g.oracle_calls;
  return out;
}

PolarLOResult polar_lo_1d(const ConvexBody& body, const Vec& w, double delta, Rng& rng) {
  check_lo_inputs(body, w, delta);
  const PolarLOParams p = polar_lo_params(body, delta);
  std::uniform_int_distribution<int> pick(0, body.dim() - 1);
  const int I = pick(rng);
  const Smoothing s = draw_smoothing(w, p, rng);
  PolarLOResult out;
  out.variant = LOVariant::one_dim;
  out.sampled_coordinate = I;
  out.s_tilde = Vec::Zero(w.size());
  out.s_tilde(I) = body.dim() * coordinate_slope(body, s, I, p, out.oracle_calls);
  const GaugeEval g = gauge_approx(body, w, delta);
  out.gamma_tilde = g.gamma_tilde;
  out.oracle_calls += g.oracle_calls;
  return out;
}

PolarLOResult polar_lo(const ConvexBody& body, const Vec& w, double delta, Rng& rng,
                       LOVariant variant) {
  return variant == LOVariant::full ? polar_lo_full(body, w, delta, rng)
                                    : polar_lo_1d(body, w, delta, rng);
}

LOVariant lo_variant_for_block(int k, int d) {
  if (k == d) return LOVariant::full;
  if (k == 1) return LOVariant::one_dim;
  throw PreconditionError("block LO oracle: only k = 1 and k = d are supported");
}

double gauge_distance(double gamma_tilde) {
  if (!(gamma_tilde >= 0.0)) throw PreconditionError("gauge_distance: gamma must be nonnegative");
  return std::max(0.0, gamma_tilde - 1.0);
}

Vec gauge_project(const Vec& w, double gamma_tilde) {
  if (!(gamma_tilde >= 0.0)) throw PreconditionError("gauge_project: gamma must be nonnegative");
  if (gamma_tilde >= 1.0) return w / gamma_tilde;
  return w;
}

}  // namespace gaugeopt
