#include "gaugeopt/reductions.hpp"

#include <algorithm>
#include <cmath>

#include "gaugeopt/errors.hpp"

namespace gaugeopt {

namespace {

void require_finite_vec(const Vec& v, Eigen::Index d, const char* who) {
  if (v.size() != d) throw PreconditionError(std::string(who) + ": dimension mismatch");
  if (!v.allFinite()) throw PreconditionError(std::string(who) + ": non-finite input");
}

}  // namespace

double ToleranceSchedule::at(std::int64_t t) const {
  if (t < 1) throw PreconditionError("ToleranceSchedule: rounds start at 1");
  const double s = static_cast<double>(t);
  switch (kind) {
    case Kind::quad: return delta / (s * s);
    case Kind::sqrt: return delta / std::sqrt(s);
    case Kind::cubic: return delta / (s * s * s);
    case Kind::constant: return delta;
  }
  return delta;
}

ToleranceSchedule ToleranceSchedule::parse(const std::string& name, double delta) {
  if (!(delta > 0.0 && delta < 1.0 / 3.0))
    throw PreconditionError("ToleranceSchedule: delta must lie in (0, 1/3)");
  ToleranceSchedule s;
  s.delta = delta;
  if (name == "quad") s.kind = Kind::quad;
  else if (name == "sqrt") s.kind = Kind::sqrt;
  else if (name == "cubic") s.kind = Kind::cubic;
  else if (name == "constant") s.kind = Kind::constant;
  else throw PreconditionError("ToleranceSchedule: unknown schedule '" + name + "'");
  return s;
}

std::string ToleranceSchedule::name() const {
  switch (kind) {
    case Kind::quad: return "quad";
    case Kind::sqrt: return "sqrt";
    case Kind::cubic: return "cubic";
    case Kind::constant: return "constant";
  }
  return "quad";
}

LinearSubroutine::LinearSubroutine(std::unique_ptr<OnlineLearner> learner)
    : learner_(std::move(learner)) {
  if (!learner_) throw PreconditionError("LinearSubroutine: learner missing");
}

void LinearSubroutine::update(const Vec&, const Vec&, const Vec& gtilde) {
  learner_->update(gtilde);
}

StronglyConvexSubroutine::StronglyConvexSubroutine(int dim, double R, double epsilon)
    : freegrad_(dim, R, epsilon),
      Btilde_(epsilon),
      Z_(2.0 * epsilon * epsilon),
      v_(Vec::Zero(dim)),
      w_(Vec::Zero(dim)) {}

void StronglyConvexSubroutine::update(const Vec& x, const Vec&, const Vec& gtilde) {
  require_finite_vec(x, w_.size(), "StronglyConvexSubroutine");
  require_finite_vec(gtilde, w_.size(), "StronglyConvexSubroutine");
  const double B_prev = Btilde_;
  Btilde_ = std::max(Btilde_, gtilde.norm());
  const double ghat_sq = gtilde.squaredNorm() * (B_prev / Btilde_) * (B_prev / Btilde_);
  freegrad_.update(gtilde);
  Z_ += ghat_sq + Btilde_ * Btilde_ - B_prev * B_prev;
  v_ += ghat_sq * x;
  w_ = freegrad_.current() + v_ / Z_;
}

SmoothStochasticSubroutine::SmoothStochasticSubroutine(int dim, double R_inner, double nu,
                                                       double epsilon, double lambda_init)
    : ftrl_(dim, R_inner),
      R_inner_(R_inner),
      nu_(nu),
      Lambda_(lambda_init),
      Z_(epsilon * epsilon),
      w_(Vec::Zero(dim)) {
  if (!(epsilon > 0.0)) throw PreconditionError("SmoothStochasticSubroutine: epsilon must be positive");
  if (!(nu > 0.0)) throw PreconditionError("SmoothStochasticSubroutine: nu must be positive");
  if (!(lambda_init >= 0.0)) throw PreconditionError("SmoothStochasticSubroutine: bad Lambda_1");
}

double SmoothStochasticSubroutine::nu_for(int dim, double kappa) {
  return 4.0 * std::sqrt(2.0) * (1.0 + dim * kappa);
}

void SmoothStochasticSubroutine::update(const Vec& x, const Vec& g, const Vec& gtilde) {
  require_finite_vec(x, w_.size(), "SmoothStochasticSubroutine");
  require_finite_vec(g, w_.size(), "SmoothStochasticSubroutine");
  require_finite_vec(gtilde, w_.size(), "SmoothStochasticSubroutine");
  ++t_;
  const double t = static_cast<double>(t_);
  ftrl_.update(t * gtilde);
  Z_ += Lambda_ * g.squaredNorm();
  eta_ = nu_ * R_inner_ / std::sqrt(Z_);
  Lambda_ += t + 1.0;
  mu_ = (t + 1.0) / Lambda_;
  w_ = (1.0 - mu_) * (x - eta_ * g) + mu_ * ftrl_.current();
  // Guard against rounding only; the containment chain keeps w in B((1 + nu) R').
  w_ = ball_project(w_, outer_radius());
}

LearnerAlgorithm::LearnerAlgorithm(std::unique_ptr<OnlineLearner> learner)
    : learner_(std::move(learner)) {
  if (!learner_) throw PreconditionError("LearnerAlgorithm: learner missing");
}

Vec LearnerAlgorithm::predict() {
  info_.w = learner_->current();
  info_.x = info_.w;
  info_.gamma = 0.0;
  info_.oracle_calls = 0;
  return info_.x;
}

void LearnerAlgorithm::update(const Vec& g) {
  learner_->update(g);
  info_.gtilde = g;
}

Wrapper::Wrapper(ConvexBody body, std::unique_ptr<Subroutine> sub, ToleranceSchedule schedule,
                 LOVariant variant, std::uint64_t seed)
    : body_(std::move(body)),
      sub_(std::move(sub)),
      schedule_(schedule),
      variant_(variant),
      rng_(seed),
      nu_(Vec::Zero(body_.dim())) {
  if (!sub_) throw PreconditionError("Wrapper: subroutine missing");
  if (sub_->dim() != body_.dim()) throw PreconditionError("Wrapper: dimension mismatch");
  // The working precision does not depend on delta, so an infeasible body fails here.
  polar_lo_params(body_, schedule_.delta);
}

Vec Wrapper::predict() {
  if (pending_) throw InvariantViolation("Wrapper: predict called twice without update");
  ++t_;
  const double delta = schedule_.at(t_);
  const Vec& w = sub_->current();
  const PolarLOResult lo = polar_lo(body_, w, delta, rng_, variant_);
  calls_ += lo.oracle_calls;
  if (lo.gamma_tilde >= 1.0) nu_ = lo.s_tilde; else nu_.setZero();
  info_.w = w;
  info_.x = gauge_project(w, lo.gamma_tilde);
  info_.gamma = lo.gamma_tilde;
  info_.delta = delta;
  info_.oracle_calls = lo.oracle_calls;
  pending_ = true;
  return info_.x;
}

void Wrapper::update(const Vec& g) {
  if (!pending_) throw InvariantViolation("Wrapper: update called before predict");
  require_finite_vec(g, body_.dim(), "Wrapper::update");
  Vec gtilde = g;
  if (g.dot(info_.w) < 0.0) gtilde -= g.dot(info_.x) * nu_;
  sub_->update(info_.x, g, gtilde);
  info_.gtilde = std::move(gtilde);
  pending_ = false;
}

Restart::Restart(int dim, Factory factory) : dim_(dim), factory_(std::move(factory)) {
  if (!factory_) throw PreconditionError("Restart: factory missing");
}

Vec Restart::predict() {
  ++t_;
  if (!inner_) {
    info_ = RoundInfo{};
    info_.w = Vec::Zero(dim_);
    info_.x = Vec::Zero(dim_);
    return info_.x;
  }
  const Vec y = inner_->predict();
  info_ = inner_->info();
  return y;
}

void Restart::update(const Vec& g) {
  if (g.size() != dim_ || !g.allFinite()) throw PreconditionError("Restart: bad gradient");
  const double B_prev = B_;
  const double gn = g.norm();
  B_ = std::max(B_, gn);
  if (B_ == 0.0) {
    info_.gtilde = g;
    return;
  }
  S_ += gn / B_;
  if (B_prev == 0.0 || B_ / B_tau_ >= S_) {
    tau_ = t_;
    S_ = 0.0;
    B_tau_ = B_;
    inner_ = factory_(B_tau_, epochs_++);
    // The fresh learner's first output stands in for round tau's point.
    inner_->predict();
    info_.oracle_calls += inner_->info().oracle_calls;
  }
  inner_->update(g);
  info_.gtilde = inner_->info().gtilde;
}

Vec online_to_batch(const std::vector<Vec>& played) {
  if (played.empty()) throw PreconditionError("online_to_batch: no rounds recorded");
  Vec avg = Vec::Zero(played.front().size());
  for (const Vec& x : played) avg += x;
  return avg / static_cast<double>(played.size());
}

std::uint64_t wrapper_round_budget(const ConvexBody& body, double delta_t, LOVariant variant) {
  return polar_lo_call_budget(body, delta_t, variant);
}

std::unique_ptr<Wrapper> make_wrapper_ftrl(const ConvexBody& body, ToleranceSchedule schedule,
                                           LOVariant variant, std::uint64_t seed) {
  auto sub = std::make_unique<LinearSubroutine>(
      std::make_unique<FtrlProximal>(body.dim(), body.outer_radius()));
  return std::make_unique<Wrapper>(body, std::move(sub), schedule, variant, seed);
}

std::unique_ptr<Wrapper> make_wrapper_strongly_convex(const ConvexBody& body,
                                                      ToleranceSchedule schedule,
                                                      LOVariant variant, std::uint64_t seed,
                                                      double epsilon) {
  auto sub = std::make_unique<StronglyConvexSubroutine>(body.dim(), body.outer_radius(), epsilon);
  return std::make_unique<Wrapper>(with_outer_radius(body, 2.0 * body.outer_radius()),
                                   std::move(sub), schedule, variant, seed);
}

std::unique_ptr<Wrapper> make_wrapper_smooth_stochastic(const ConvexBody& body,
                                                        ToleranceSchedule schedule,
                                                        LOVariant variant, std::uint64_t seed,
                                                        double epsilon, double lambda_init) {
  const double nu = SmoothStochasticSubroutine::nu_for(body.dim(), body.kappa());
  auto sub = std::make_unique<SmoothStochasticSubroutine>(body.dim(), body.outer_radius(), nu,
                                                          epsilon, lambda_init);
  const double R = sub->outer_radius();
  return std::make_unique<Wrapper>(with_outer_radius(body, R), std::move(sub), schedule, variant,
                                   seed);
}

}  // namespace gaugeopt
