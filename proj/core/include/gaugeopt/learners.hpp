#pragma once

#include <limits>

#include "gaugeopt/types.hpp"

namespace gaugeopt {

Vec ball_project(const Vec& x, double R);

// Online learner on B(R) fed linear losses <grad, .>.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  virtual const Vec& current() const = 0;
  virtual void update(const Vec& grad) = 0;
  virtual int dim() const = 0;
};

class FtrlProximal final : public OnlineLearner {
 public:
  FtrlProximal(int dim, double R);

  const Vec& current() const override { return w_; }
  void update(const Vec& grad) override;
  int dim() const override { return static_cast<int>(w_.size()); }

  double radius() const { return R_; }
  const Vec& gradient_sum() const { return G_; }
  double squared_norm_sum() const { return V_; }
  const Vec& weighted_iterate_sum() const { return anchor_; }
  double sigma_sum() const { return Sigma_; }

 private:
  double R_;
  Vec G_;
  double V_ = 0.0;
  Vec anchor_;  // sum of sigma_s w_s
  double Sigma_ = 0.0;
  Vec w_;
};

class FreeGrad final : public OnlineLearner {
 public:
  FreeGrad(int dim, double R, double epsilon);

  const Vec& current() const override { return w_; }
  void update(const Vec& grad) override;
  int dim() const override { return static_cast<int>(w_.size()); }

  double epsilon() const { return eps_; }
  double radius() const { return R_; }
  double max_norm() const { return B_; }
  const Vec& gradient_sum() const { return G_; }
  double squared_sum() const { return Q_; }
  const Vec& hint() const { return s_; }
  // Norm of the unconstrained iterate, in log scale since it can overflow.
  double log_unconstrained_norm() const { return log_x_norm_; }
  // Clipped gradient of the most recent update.
  const Vec& last_clipped() const { return clipped_; }

 private:
  double eps_;
  double R_;
  double B_;
  Vec G_;
  double Q_;
  Vec w_;
  Vec s_;
  Vec clipped_;
  double log_x_norm_ = -std::numeric_limits<double>::infinity();
};

}  // namespace gaugeopt
