#include "gaugeopt/learners.hpp"

#include <algorithm>
#include <cmath>

#include "gaugeopt/errors.hpp"

namespace gaugeopt {

namespace {

void require_gradient(const Vec& g, Eigen::Index d, const char* who) {
  if (g.size() != d) throw PreconditionError(std::string(who) + ": dimension mismatch");
  if (!g.allFinite()) throw PreconditionError(std::string(who) + ": non-finite gradient");
}

}  // namespace

Vec ball_project(const Vec& x, double R) {
  if (!(R > 0.0)) throw PreconditionError("ball_project: radius must be positive");
  const double n = x.norm();
  if (n <= R) return x;
  return (R / n) * x;
}

FtrlProximal::FtrlProximal(int dim, double R)
    : R_(R), G_(Vec::Zero(dim)), anchor_(Vec::Zero(dim)), w_(Vec::Zero(dim)) {
  if (dim < 1) throw PreconditionError("FtrlProximal: dimension must be positive");
  if (!(R > 0.0)) throw PreconditionError("FtrlProximal: radius must be positive");
}

void FtrlProximal::update(const Vec& grad) {
  require_gradient(grad, w_.size(), "FtrlProximal");
  V_ += grad.squaredNorm();
  G_ += grad;
  if (V_ == 0.0) return;
  // 1/eta_t = sqrt(V_t)/(sqrt(2) R), with 1/eta_0 = 0.
  const double inv_eta = std::sqrt(V_) / (std::sqrt(2.0) * R_);
  const double sigma = inv_eta - Sigma_;
  anchor_ += sigma * w_;
  Sigma_ = inv_eta;
  w_ = ball_project((anchor_ - G_) / Sigma_, R_);
}

FreeGrad::FreeGrad(int dim, double R, double epsilon)
    : eps_(epsilon),
      R_(R),
      B_(epsilon),
      G_(Vec::Zero(dim)),
      Q_(epsilon * epsilon),
      w_(Vec::Zero(dim)),
      s_(Vec::Zero(dim)),
      clipped_(Vec::Zero(dim)) {
  if (dim < 1) throw PreconditionError("FreeGrad: dimension must be positive");
  if (!(R > 0.0) || !(epsilon > 0.0)) throw PreconditionError("FreeGrad: R and epsilon must be positive");
}

void FreeGrad::update(const Vec& grad) {
  require_gradient(grad, w_.size(), "FreeGrad");
  const double B_prev = B_;
  B_ = std::max(B_, grad.norm());
  clipped_ = grad * (B_prev / B_);
  Vec corrected = clipped_;
  if (grad.dot(w_) < 0.0) corrected -= clipped_.dot(s_) * s_;
  G_ += corrected;
  Q_ += corrected.squaredNorm();

  const double g = G_.norm();
  const double denom = Q_ + B_ * g;
  if (g == 0.0 || denom < 1e-300) {
    w_.setZero();
    s_.setZero();
    log_x_norm_ = -std::numeric_limits<double>::infinity();
    return;
  }
  // ||x|| = g (2Q + B g) eps^2 / (2 denom^2 sqrt(Q)) * exp(g^2 / (2 denom)), in logs.
  log_x_norm_ = std::log(g) + std::log(2.0 * Q_ + B_ * g) + 2.0 * std::log(eps_) - std::log(2.0) -
                2.0 * std::log(denom) - 0.5 * std::log(Q_) + g * g / (2.0 * denom);
  const Vec dir = -G_ / g;
  if (log_x_norm_ > std::log(R_)) {
    w_ = R_ * dir;
    s_ = dir;
  } else {
    w_ = std::exp(log_x_norm_) * dir;
    s_.setZero();
  }
}

}  // namespace gaugeopt
