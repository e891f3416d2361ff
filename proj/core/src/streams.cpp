#include "gaugeopt/streams.hpp"

#include <cmath>

#include "gaugeopt/errors.hpp"

namespace gaugeopt {

AdversarialLinearStream::AdversarialLinearStream(std::uint64_t seed, int dim, double B, Mode mode)
    : rng_(seed), B_(B), mode_(mode), g_(Vec::Zero(dim)) {
  if (dim < 1) throw PreconditionError("AdversarialLinearStream: dimension must be positive");
  if (!(B > 0.0)) throw PreconditionError("AdversarialLinearStream: B must be positive");
}

void AdversarialLinearStream::begin_round(std::int64_t) {
  if (mode_ != Mode::iid) return;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < g_.size(); ++i) g_(i) = normal(rng_);
  const double n = g_.norm();
  if (n == 0.0) {
    g_.setZero();
    g_(0) = B_;
  } else {
    g_ *= B_ / n;
  }
}

Vec AdversarialLinearStream::gradient(const Vec& x) {
  if (x.size() != g_.size()) throw PreconditionError("AdversarialLinearStream: dimension mismatch");
  if (mode_ == Mode::adaptive) {
    const double n = x.norm();
    if (n == 0.0) {
      g_.setZero();
      g_(0) = B_;
    } else {
      g_ = (B_ / n) * x;
    }
  }
  return g_;
}

StronglyConvexStream::StronglyConvexStream(std::uint64_t seed, double mu, Vec x_star, double b_scale)
    : rng_(seed), mu_(mu), x_star_(std::move(x_star)), b_scale_(b_scale), b_(Vec::Zero(x_star_.size())) {
  if (!(mu > 0.0)) throw PreconditionError("StronglyConvexStream: mu must be positive");
  if (!(b_scale >= 0.0)) throw PreconditionError("StronglyConvexStream: b_scale must be nonnegative");
  if (x_star_.size() < 1) throw PreconditionError("StronglyConvexStream: empty x*");
}

void StronglyConvexStream::begin_round(std::int64_t) {
  std::uniform_real_distribution<double> unif(-b_scale_, b_scale_);
  if (b_scale_ == 0.0) return;
  for (Eigen::Index i = 0; i < b_.size(); ++i) b_(i) = unif(rng_);
}

Vec StronglyConvexStream::gradient(const Vec& x) {
  if (x.size() != x_star_.size()) throw PreconditionError("StronglyConvexStream: dimension mismatch");
  return mu_ * (x - x_star_) + b_;
}

double StronglyConvexStream::loss(const Vec& x) const {
  return 0.5 * mu_ * (x - x_star_).squaredNorm() + b_.dot(x);
}

SmoothStochasticStream::SmoothStochasticStream(std::uint64_t seed, double beta, double sigma, Vec x_star)
    : rng_(seed), beta_(beta), sigma_(sigma), x_star_(std::move(x_star)), xi_(Vec::Zero(x_star_.size())) {
  if (!(beta > 0.0)) throw PreconditionError("SmoothStochasticStream: beta must be positive");
  if (!(sigma >= 0.0)) throw PreconditionError("SmoothStochasticStream: sigma must be nonnegative");
  if (x_star_.size() < 1) throw PreconditionError("SmoothStochasticStream: empty x*");
}

void SmoothStochasticStream::begin_round(std::int64_t) {
  if (sigma_ == 0.0) return;
  const double per_coord = sigma_ / std::sqrt(static_cast<double>(xi_.size()));
  std::normal_distribution<double> normal(0.0, per_coord);
  do {
    for (Eigen::Index i = 0; i < xi_.size(); ++i) xi_(i) = normal(rng_);
  } while (xi_.norm() > 4.0 * sigma_);
}

Vec SmoothStochasticStream::gradient(const Vec& x) {
  if (x.size() != x_star_.size()) throw PreconditionError("SmoothStochasticStream: dimension mismatch");
  return beta_ * (x - x_star_) + xi_;
}

}  // namespace gaugeopt
