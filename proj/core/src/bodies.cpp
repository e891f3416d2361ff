#include "gaugeopt/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gaugeopt/errors.hpp"
#include "gaugeopt/spectral.hpp"

namespace gaugeopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Absorbs rounding in constraint evaluation so points on the boundary answer true.
constexpr double kTie = 16.0 * kEps;
constexpr double kSpectralResolution = 1e-12;

Mat as_matrix(const Vec& x, int m, int n) {
  return Eigen::Map<const RowMajorMat>(x.data(), m, n);
}

Vec flatten(const Mat& M) {
  RowMajorMat R = M;
  return Eigen::Map<const Vec>(R.data(), R.size());
}

double lp_norm(const Vec& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((x.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

// Tolerance on lambda_min that keeps a spectral membership answer within
// Euclidean distance delta of C, given lambda_min(center) = lambda_c.
double spectral_target(double delta, double lambda_c, const Vec& x) {
  return delta * lambda_c / (2.0 * std::max(x.norm(), 1.0));
}

void require_dim(int d, int min, const char* who) {
  if (d < min) throw PreconditionError(std::string(who) + ": dimension too small");
}

}  // namespace

ConvexBody::ConvexBody(std::string name, int dim, double inner_radius, double outer_radius,
                       MembershipFn membership, GaugeFn analytic_gauge, bool exact,
                       double resolution)
    : name_(std::move(name)),
      dim_(dim),
      r_(inner_radius),
      R_(outer_radius),
      membership_(std::move(membership)),
      gauge_(std::move(analytic_gauge)),
      exact_(exact),
      resolution_(resolution) {
  if (dim_ < 1) throw PreconditionError("ConvexBody: dimension must be positive");
  if (!(r_ > 0.0) || !(R_ >= r_)) throw PreconditionError("ConvexBody: need 0 < r <= R");
  if (!membership_) throw PreconditionError("ConvexBody: membership procedure missing");
}

bool ConvexBody::membership(const Vec& p, double delta) const {
  if (p.size() != dim_) throw PreconditionError("membership: dimension mismatch for " + name_);
  if (!p.allFinite()) throw PreconditionError("membership: non-finite point for " + name_);
  if (!(delta > 0.0)) throw PreconditionError("membership: delta must be positive");
  if (counter_) counter_->fetch_add(1, std::memory_order_relaxed);
  if (p.isZero(0.0)) return true;
  return membership_(p, delta);
}

double ConvexBody::analytic_gauge(const Vec& p) const {
  if (!gauge_) throw PreconditionError("analytic_gauge: not available for " + name_);
  if (p.size() != dim_) throw PreconditionError("analytic_gauge: dimension mismatch");
  return gauge_(p);
}

std::uint64_t ConvexBody::oracle_calls() const {
  return counter_ ? counter_->load(std::memory_order_relaxed) : 0;
}

ConvexBody oracle_call_counter(const ConvexBody& body) {
  ConvexBody wrapped = body;
  wrapped.membership_ = [inner = body](const Vec& p, double delta) {
    return inner.membership(p, delta);
  };
  wrapped.counter_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return wrapped;
}

ConvexBody with_outer_radius(const ConvexBody& body, double R) {
  if (!(R >= body.outer_radius())) throw PreconditionError("with_outer_radius: radius cannot shrink");
  ConvexBody widened = body;
  widened.R_ = R;
  return widened;
}

ConvexBody make_lp_ball(int d, double p) {
  require_dim(d, 1, "make_lp_ball");
  if (!(p >= 1.0)) throw PreconditionError("make_lp_ball: p must be at least 1");
  const double expo = 0.5 - (std::isinf(p) ? 0.0 : 1.0 / p);
  const double scale = std::pow(static_cast<double>(d), expo);
  const double r = p <= 2.0 ? scale : 1.0;
  const double R = p <= 2.0 ? 1.0 : scale;
  auto mem = [p](const Vec& x, double) { return lp_norm(x, p) <= 1.0 + kTie; };
  auto gauge = [p](const Vec& x) { return lp_norm(x, p); };
  return ConvexBody(p == 2.0 ? "l2_ball" : "lp_ball", d, r, R, mem, gauge, true);
}

ConvexBody make_l2_ball(int d) { return make_lp_ball(d, 2.0); }

BodyWithMap make_simplex_body(int d) {
  require_dim(d, 2, "make_simplex_body");
  const double a = 1.0 / (2.0 * d);
  const double b = 0.5 + a;
  auto mem = [a, b](const Vec& x, double) {
    return x.minCoeff() >= -a - kTie && x.sum() <= b + kTie * (1.0 + x.cwiseAbs().sum());
  };
  auto gauge = [a, b](const Vec& x) {
    return std::max({0.0, -x.minCoeff() / a, x.sum() / b});
  };
  ConvexBody body("simplex", d - 1, a, 1.0, mem, gauge, true);

  Reparametrization map;
  map.ambient_dim = d;
  map.reduced_dim = d - 1;
  map.center = Vec::Constant(d, a);
  map.center(d - 1) = b;
  map.forward = [c = map.center, d](const Vec& x) {
    Vec out = c;
    out.head(d - 1) += x;
    out(d - 1) -= x.sum();
    return out;
  };
  map.pullback_subgradient = [d](const Vec& zeta, const Vec&) {
    return Vec(zeta.head(d - 1).array() - zeta(d - 1));
  };
  return {std::move(body), std::move(map)};
}

ConvexBody make_trace_norm_ball(int m, int n) {
  require_dim(m, 1, "make_trace_norm_ball");
  require_dim(n, 1, "make_trace_norm_ball");
  auto nuclear = [m, n](const Vec& x) { return svd(as_matrix(x, m, n)).sigma.sum(); };
  auto mem = [nuclear](const Vec& x, double) { return nuclear(x) <= 1.0 + kTie * x.size(); };
  return ConvexBody("trace_ball", m * n, 1.0 / std::sqrt(static_cast<double>(std::min(m, n))), 1.0, mem,
                    nuclear, true, kSpectralResolution);
}

ConvexBody make_op_norm_ball(int m, int n) {
  require_dim(m, 1, "make_op_norm_ball");
  require_dim(n, 1, "make_op_norm_ball");
  auto mem = [m, n](const Vec& x, double delta) {
    const double target = delta / (2.0 * std::max(x.norm(), 1.0));
    const SpectralEstimate est = largest_singular_value(as_matrix(x, m, n), target);
    return est.value <= 1.0 + est.certified_error;
  };
  auto gauge = [m, n](const Vec& x) { return svd(as_matrix(x, m, n)).sigma(0); };
  return ConvexBody("op_ball", m * n, 1.0, std::sqrt(static_cast<double>(std::min(m, n))), mem, gauge,
                    false, kSpectralResolution);
}

Mat helmert_basis(int n) {
  require_dim(n, 2, "helmert_basis");
  Mat Q = Mat::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) Q(i, k - 1) = s;
    Q(k, k - 1) = -k * s;
  }
  return Q;
}

BodyWithMap make_birkhoff_body(int n) {
  require_dim(n, 2, "make_birkhoff_body");
  const Mat Q = helmert_basis(n);
  const int k = n - 1;
  auto offset = [Q, k](const Vec& x) -> Mat { return Q * as_matrix(x, k, k) * Q.transpose(); };
  const double floor = 1.0 / n;
  auto mem = [offset, floor](const Vec& x, double) {
    return offset(x).minCoeff() >= -floor - kTie;
  };
  auto gauge = [offset, n](const Vec& x) { return std::max(0.0, -n * offset(x).minCoeff()); };
  ConvexBody body("birkhoff", k * k, 1.0 / k, std::sqrt(static_cast<double>(k)), mem, gauge, true);

  Reparametrization map;
  map.ambient_dim = n * n;
  map.reduced_dim = k * k;
  map.center = Vec::Constant(n * n, floor);
  map.forward = [offset, floor](const Vec& x) {
    Mat X = offset(x);
    X.array() += floor;
    return flatten(X);
  };
  map.pullback_subgradient = [Q, n](const Vec& zeta, const Vec&) {
    return flatten(Q.transpose() * as_matrix(zeta, n, n) * Q);
  };
  return {std::move(body), std::move(map)};
}

double signed_procrustes(const Mat& A) {
  const SvdResult f = svd(A);
  const Eigen::Index n = f.sigma.size();
  const double sign = (f.U.determinant() * f.V.determinant()) < 0.0 ? -1.0 : 1.0;
  return f.sigma.head(n - 1).sum() + sign * f.sigma(n - 1);
}

ConvexBody make_rotation_hull_body(int n) {
  require_dim(n, 3, "make_rotation_hull_body");
  // The hull of SO(n) is the operator-norm ball cut by the polar of (n-2) SO^-(n),
  // and SO^-(n) = D SO(n) with D = diag(1, ..., 1, -1).
  auto parts = [n](const Vec& x) {
    Mat X = as_matrix(x, n, n);
    const double op = svd(X).sigma(0);
    X.row(n - 1) *= -1.0;
    return std::pair<double, double>(op, signed_procrustes(X));
  };
  auto mem = [parts, n](const Vec& x, double) {
    const auto [op, proc] = parts(x);
    const double slack = kTie * n * std::max(1.0, x.norm());
    return op <= 1.0 + slack && proc <= (n - 2) * (1.0 + slack);
  };
  auto gauge = [parts, n](const Vec& x) {
    const auto [op, proc] = parts(x);
    return std::max({0.0, op, proc / (n - 2)});
  };
  return ConvexBody("rotation_hull", n * n, 0.5, std::sqrt(static_cast<double>(n)), mem, gauge,
                    true, kSpectralResolution);
}

Mat symmetric_from_upper(int n, const Vec& z) {
  if (z.size() != n * (n - 1) / 2) throw PreconditionError("symmetric_from_upper: size mismatch");
  Mat S = Mat::Zero(n, n);
  Eigen::Index k = 0;
  for (int q = 1; q < n; ++q) {
    for (int p = 0; p < q; ++p) {
      S(p, q) = z(k);
      S(q, p) = z(k);
      ++k;
    }
  }
  return S;
}

namespace {

Vec upper_pullback(int n, const Mat& Z) {
  Vec g(n * (n - 1) / 2);
  Eigen::Index k = 0;
  for (int q = 1; q < n; ++q)
    for (int p = 0; p < q; ++p) g(k++) = Z(p, q) + Z(q, p);
  return g;
}

}  // namespace

BodyWithMap make_psd_unit_trace_body(int n) {
  require_dim(n, 2, "make_psd_unit_trace_body");
  const int ny = n - 1;
  const int dim = ny + n * (n - 1) / 2;
  Vec cdiag = Vec::Constant(n, 1.0 / (2.0 * n));
  cdiag(n - 1) += 0.5;
  auto matrix = [cdiag, n, ny](const Vec& x) {
    Vec diag = cdiag;
    diag.head(ny) += x.head(ny);
    diag(n - 1) -= x.head(ny).sum();
    Mat M = symmetric_from_upper(n, x.tail(x.size() - ny));
    M.diagonal() += diag;
    return M;
  };
  const double lambda_c = 1.0 / (2.0 * n);
  auto mem = [matrix, lambda_c](const Vec& x, double delta) {
    const SpectralEstimate est =
        smallest_eigenvalue(matrix(x), spectral_target(delta, lambda_c, x));
    return est.value >= -est.certified_error;
  };
  ConvexBody body("psd_trace", dim, std::pow(static_cast<double>(n), -1.5) / 4.0,
                  2.0 * std::sqrt(static_cast<double>(n)), mem, {}, false, kSpectralResolution);

  Reparametrization map;
  map.ambient_dim = n * n;
  map.reduced_dim = dim;
  map.center = flatten(Mat(cdiag.asDiagonal()));
  map.forward = [matrix](const Vec& x) { return flatten(matrix(x)); };
  map.pullback_subgradient = [n, ny](const Vec& zeta, const Vec&) {
    const Mat Z = as_matrix(zeta, n, n);
    Vec g(ny + n * (n - 1) / 2);
    for (int i = 0; i < ny; ++i) g(i) = Z(i, i) - Z(n - 1, n - 1);
    g.tail(g.size() - ny) = upper_pullback(n, Z);
    return g;
  };
  return {std::move(body), std::move(map)};
}

BodyWithMap make_psd_bounded_diag_body(int n) {
  require_dim(n, 2, "make_psd_bounded_diag_body");
  const int dim = n + n * (n - 1) / 2;
  auto matrix = [n](const Vec& x) {
    Mat M = symmetric_from_upper(n, x.tail(x.size() - n));
    M.diagonal().array() += x.head(n).array() + 0.5;
    return M;
  };
  auto mem = [matrix, n](const Vec& x, double delta) {
    if (x.head(n).maxCoeff() > 0.5 + kTie) return false;
    const SpectralEstimate est = smallest_eigenvalue(matrix(x), spectral_target(delta, 0.5, x));
    return est.value >= -est.certified_error;
  };
  ConvexBody body("psd_diag", dim, 0.25, std::pow(static_cast<double>(n), 1.5), mem, {}, false,
                  kSpectralResolution);

  Reparametrization map;
  map.ambient_dim = n * n;
  map.reduced_dim = dim;
  map.center = flatten(Mat(0.5 * Mat::Identity(n, n)));
  map.forward = [matrix](const Vec& x) { return flatten(matrix(x)); };
  map.pullback_subgradient = [n](const Vec& zeta, const Vec&) {
    const Mat Z = as_matrix(zeta, n, n);
    Vec g(n + n * (n - 1) / 2);
    g.head(n) = Z.diagonal();
    g.tail(g.size() - n) = upper_pullback(n, Z);
    return g;
  };
  return {std::move(body), std::move(map)};
}

}  // namespace gaugeopt
