#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "gaugeopt/types.hpp"

namespace gaugeopt {

// A convex body C with B(r) ⊆ C ⊆ B(R) and a delta-approximate membership test.
// Immutable after construction except for the optional shared call counter.
class ConvexBody {
 public:
  using MembershipFn = std::function<bool(const Vec&, double)>;
  using GaugeFn = std::function<double(const Vec&)>;

  ConvexBody(std::string name, int dim, double inner_radius, double outer_radius,
             MembershipFn membership, GaugeFn analytic_gauge = {}, bool exact = false,
             double resolution = 0.0);

  // Points at the origin are always members. Throws PreconditionError on a
  // dimension mismatch, non-finite input or delta <= 0.
  bool membership(const Vec& p, double delta) const;

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double inner_radius() const { return r_; }
  double outer_radius() const { return R_; }
  double kappa() const { return R_ / r_; }
  bool exact() const { return exact_; }
  // Smallest Euclidean error the membership answer can honor in floating point.
  double resolution() const { return resolution_; }

  bool has_analytic_gauge() const { return static_cast<bool>(gauge_); }
  double analytic_gauge(const Vec& p) const;

  // Zero when the body is not wrapped by oracle_call_counter.
  std::uint64_t oracle_calls() const;
  std::shared_ptr<std::atomic<std::uint64_t>> counter() const { return counter_; }

 private:
  friend ConvexBody oracle_call_counter(const ConvexBody& body);
  friend ConvexBody with_outer_radius(const ConvexBody& body, double R);

  std::string name_;
  int dim_;
  double r_;
  double R_;
  MembershipFn membership_;
  GaugeFn gauge_;
  bool exact_;
  double resolution_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

// Wraps a body so every membership invocation increments a fresh shared counter.
ConvexBody oracle_call_counter(const ConvexBody& body);

// Same set, larger declared outer radius (R must be at least the current one).
ConvexBody with_outer_radius(const ConvexBody& body, double R);

// Affine reparametrization x -> c + H x from the body's space into the original set K.
struct Reparametrization {
  int ambient_dim = 0;
  int reduced_dim = 0;
  Vec center;
  std::function<Vec(const Vec&)> forward;
  // Adjoint of the linear part; the reduced point is accepted for interface symmetry.
  std::function<Vec(const Vec&, const Vec&)> pullback_subgradient;
};

struct BodyWithMap {
  ConvexBody body;
  Reparametrization map;
};

ConvexBody make_lp_ball(int d, double p);
ConvexBody make_l2_ball(int d);
BodyWithMap make_simplex_body(int d);
ConvexBody make_trace_norm_ball(int m, int n);
ConvexBody make_op_norm_ball(int m, int n);
BodyWithMap make_birkhoff_body(int n);
ConvexBody make_rotation_hull_body(int n);
BodyWithMap make_psd_unit_trace_body(int n);
BodyWithMap make_psd_bounded_diag_body(int n);

// Helpers shared with tests and the harness.
Mat helmert_basis(int n);                  // n x (n-1), orthonormal columns orthogonal to 1
Mat symmetric_from_upper(int n, const Vec& z);  // U(z) + U(z)^T, U strictly upper, column-major fill
double signed_procrustes(const Mat& A);    // max over SO(n) of <O, A>

}  // namespace gaugeopt
