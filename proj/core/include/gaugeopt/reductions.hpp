#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gaugeopt/bodies.hpp"
#include "gaugeopt/gauge.hpp"
#include "gaugeopt/learners.hpp"
#include "gaugeopt/types.hpp"

namespace gaugeopt {

struct ToleranceSchedule {
  enum class Kind { quad, sqrt, cubic, constant };
  Kind kind = Kind::quad;
  double delta = 0.1;

  double at(std::int64_t t) const;
  static ToleranceSchedule parse(const std::string& name, double delta);
  std::string name() const;
};

// Subroutine of the projection-free wrapper. It sees the played point x_t, the
// true subgradient g_t and the surrogate subgradient gtilde_t each round.
class Subroutine {
 public:
  virtual ~Subroutine() = default;
  virtual const Vec& current() const = 0;
  virtual void update(const Vec& x, const Vec& g, const Vec& gtilde) = 0;
  virtual int dim() const = 0;
};

// Feeds <gtilde_t, .> to a ball learner.
class LinearSubroutine final : public Subroutine {
 public:
  explicit LinearSubroutine(std::unique_ptr<OnlineLearner> learner);
  const Vec& current() const override { return learner_->current(); }
  void update(const Vec& x, const Vec& g, const Vec& gtilde) override;
  int dim() const override { return learner_->dim(); }
  const OnlineLearner& learner() const { return *learner_; }

 private:
  std::unique_ptr<OnlineLearner> learner_;
};

class StronglyConvexSubroutine final : public Subroutine {
 public:
  StronglyConvexSubroutine(int dim, double R, double epsilon);
  const Vec& current() const override { return w_; }
  void update(const Vec& x, const Vec& g, const Vec& gtilde) override;
  int dim() const override { return static_cast<int>(w_.size()); }

  const FreeGrad& inner() const { return freegrad_; }
  double clip_scale() const { return Btilde_; }
  double Z() const { return Z_; }
  const Vec& v() const { return v_; }

 private:
  FreeGrad freegrad_;
  double Btilde_;
  double Z_;
  Vec v_;
  Vec w_;
};

class SmoothStochasticSubroutine final : public Subroutine {
 public:
  // R_inner is the body's outer radius R'; nu as in the containment chain.
  SmoothStochasticSubroutine(int dim, double R_inner, double nu, double epsilon,
                             double lambda_init = 1.0);
  const Vec& current() const override { return w_; }
  void update(const Vec& x, const Vec& g, const Vec& gtilde) override;
  int dim() const override { return static_cast<int>(w_.size()); }

  static double nu_for(int dim, double kappa);
  double outer_radius() const { return (1.0 + nu_) * R_inner_; }
  double Lambda() const { return Lambda_; }
  double mu() const { return mu_; }
  double eta() const { return eta_; }
  double Z() const { return Z_; }
  const FtrlProximal& inner() const { return ftrl_; }

 private:
  FtrlProximal ftrl_;
  double R_inner_;
  double nu_;
  double Lambda_;
  double Z_;
  double eta_ = 0.0;
  double mu_ = 1.0;
  std::int64_t t_ = 0;
  Vec w_;
};

struct RoundInfo {
  Vec w;
  Vec x;
  Vec gtilde;
  double gamma = 0.0;
  double delta = 0.0;
  std::uint64_t oracle_calls = 0;
};

// Interface shared by everything the harness can drive: play, then observe g.
class OnlineAlgorithm {
 public:
  virtual ~OnlineAlgorithm() = default;
  virtual Vec predict() = 0;
  virtual void update(const Vec& g) = 0;
  virtual int dim() const = 0;
  virtual const RoundInfo& info() const = 0;
};

class LearnerAlgorithm final : public OnlineAlgorithm {
 public:
  explicit LearnerAlgorithm(std::unique_ptr<OnlineLearner> learner);
  Vec predict() override;
  void update(const Vec& g) override;
  int dim() const override { return learner_->dim(); }
  const RoundInfo& info() const override { return info_; }

 private:
  std::unique_ptr<OnlineLearner> learner_;
  RoundInfo info_;
};

// Projection-free wrapper: gauge-project the subroutine's point, correct the
// subgradient with the gauge-distance term, feed the surrogate back.
class Wrapper final : public OnlineAlgorithm {
 public:
  Wrapper(ConvexBody body, std::unique_ptr<Subroutine> sub, ToleranceSchedule schedule,
          LOVariant variant, std::uint64_t seed);

  Vec predict() override;
  void update(const Vec& g) override;
  int dim() const override { return body_.dim(); }
  const RoundInfo& info() const override { return info_; }

  const ConvexBody& body() const { return body_; }
  const Subroutine& subroutine() const { return *sub_; }
  std::int64_t round() const { return t_; }
  const Vec& nu() const { return nu_; }
  std::uint64_t oracle_calls() const { return calls_; }

 private:
  ConvexBody body_;
  std::unique_ptr<Subroutine> sub_;
  ToleranceSchedule schedule_;
  LOVariant variant_;
  Rng rng_;
  std::int64_t t_ = 0;
  Vec nu_;
  std::uint64_t calls_ = 0;
  bool pending_ = false;
  RoundInfo info_;
};

// Scale-invariant restarts around an algorithm parametrized by epsilon.
class Restart final : public OnlineAlgorithm {
 public:
  using Factory = std::function<std::unique_ptr<OnlineAlgorithm>(double epsilon, int epoch)>;

  Restart(int dim, Factory factory);

  Vec predict() override;
  void update(const Vec& g) override;
  int dim() const override { return dim_; }
  const RoundInfo& info() const override { return info_; }

  int restarts() const { return epochs_; }
  std::int64_t epoch_start() const { return tau_; }
  double max_norm() const { return B_; }
  double ratio_sum() const { return S_; }
  double epoch_scale() const { return B_tau_; }

 private:
  int dim_;
  Factory factory_;
  std::unique_ptr<OnlineAlgorithm> inner_;
  std::int64_t t_ = 0;
  std::int64_t tau_ = 1;
  double B_ = 0.0;
  double S_ = 0.0;
  double B_tau_ = 0.0;
  int epochs_ = 0;
  RoundInfo info_;
};

Vec online_to_batch(const std::vector<Vec>& played);

// Per-round membership budget of the wrapper with the given oracle.
std::uint64_t wrapper_round_budget(const ConvexBody& body, double delta_t, LOVariant variant);

}  // namespace gaugeopt

namespace gaugeopt {

// Wrapper + FTRL-proximal on B(R).
std::unique_ptr<Wrapper> make_wrapper_ftrl(const ConvexBody& body, ToleranceSchedule schedule,
                                           LOVariant variant, std::uint64_t seed);

// Wrapper + strongly convex subroutine. Its points u + v/Z can reach norm 2R, so
// the wrapper sees the body through a sandwich with outer radius 2R.
std::unique_ptr<Wrapper> make_wrapper_strongly_convex(const ConvexBody& body,
                                                      ToleranceSchedule schedule,
                                                      LOVariant variant, std::uint64_t seed,
                                                      double epsilon);

// Wrapper + smooth stochastic subroutine; outer radius (1 + nu) R'.
std::unique_ptr<Wrapper> make_wrapper_smooth_stochastic(const ConvexBody& body,
                                                        ToleranceSchedule schedule,
                                                        LOVariant variant, std::uint64_t seed,
                                                        double epsilon, double lambda_init = 1.0);

}  // namespace gaugeopt
