#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "gaugeopt/types.hpp"

namespace gaugeopt {

// Loss sequence seen by the harness. begin_round draws the round's randomness;
// gradient may depend on the played point (adaptive adversary).
class LossStream {
 public:
  virtual ~LossStream() = default;
  virtual void begin_round(std::int64_t t) = 0;
  virtual Vec gradient(const Vec& x) = 0;
  virtual double loss(const Vec& x) const = 0;
  virtual int dim() const = 0;
};

class AdversarialLinearStream final : public LossStream {
 public:
  enum class Mode { adaptive, iid };
  AdversarialLinearStream(std::uint64_t seed, int dim, double B, Mode mode);

  void begin_round(std::int64_t t) override;
  // Adaptive mode returns B x/||x||, and B e_1 at x = 0.
  Vec gradient(const Vec& x) override;
  double loss(const Vec& x) const override { return g_.dot(x); }
  int dim() const override { return static_cast<int>(g_.size()); }

 private:
  std::mt19937_64 rng_;
  double B_;
  Mode mode_;
  Vec g_;
};

// (mu/2)||x - x*||^2 + <b_t, x>, with b_t uniform in [-b_scale, b_scale]^d.
class StronglyConvexStream final : public LossStream {
 public:
  StronglyConvexStream(std::uint64_t seed, double mu, Vec x_star, double b_scale);

  void begin_round(std::int64_t t) override;
  Vec gradient(const Vec& x) override;
  double loss(const Vec& x) const override;
  int dim() const override { return static_cast<int>(x_star_.size()); }

  double mu() const { return mu_; }
  const Vec& x_star() const { return x_star_; }
  const Vec& offset() const { return b_; }
  double max_offset_norm() const { return b_scale_ * std::sqrt(static_cast<double>(x_star_.size())); }

 private:
  std::mt19937_64 rng_;
  double mu_;
  Vec x_star_;
  double b_scale_;
  Vec b_;
};

// f(x) = (beta/2)||x - x*||^2 observed through grad f(x) + xi, where xi is an
// isotropic Gaussian with E||xi||^2 = sigma^2 truncated at norm 4 sigma.
class SmoothStochasticStream final : public LossStream {
 public:
  SmoothStochasticStream(std::uint64_t seed, double beta, double sigma, Vec x_star);

  void begin_round(std::int64_t t) override;
  Vec gradient(const Vec& x) override;
  double loss(const Vec& x) const override { return objective(x) + x.dot(xi_); }
  int dim() const override { return static_cast<int>(x_star_.size()); }

  double objective(const Vec& x) const { return 0.5 * beta_ * (x - x_star_).squaredNorm(); }
  const Vec& noise() const { return xi_; }
  const Vec& x_star() const { return x_star_; }
  double beta() const { return beta_; }

 private:
  std::mt19937_64 rng_;
  double beta_;
  double sigma_;
  Vec x_star_;
  Vec xi_;
};

}  // namespace gaugeopt
