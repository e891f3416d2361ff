#include "gaugeopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "gaugeopt/errors.hpp"

namespace gaugeopt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(const Eigen::MatrixXd& M, const char* who) {
  if (!M.allFinite()) throw PreconditionError(std::string(who) + ": non-finite matrix entry");
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  const double nv = v.norm();
  if (nv == 0.0) v(0) = 1.0; else v /= nv;
  return v;
}

}  // namespace

SpectralEstimate largest_singular_value(const Eigen::MatrixXd& M, double delta,
                                        const SpectralOptions& opts) {
  require_finite(M, "largest_singular_value");
  if (!(delta > 0.0)) throw PreconditionError("largest_singular_value: delta must be positive");
  const Eigen::Index m = M.rows(), n = M.cols();
  if (m == 0 || n == 0) return {};
  const double fro = M.norm();
  if (fro == 0.0) return {0.0, 0.0, 0};

  // Power iteration on the Gram matrix G, doubling the exponent by squaring.
  // Lower bound: ||M v|| for v along G^k x. Upper bound: ||G^k||_F^(1/2k) >= sigma_1^2.
  const bool wide = m < n;
  const Eigen::MatrixXd Mn = M / fro;
  Eigen::MatrixXd B = wide ? Eigen::MatrixXd(Mn * Mn.transpose()) : Eigen::MatrixXd(Mn.transpose() * Mn);
  const Eigen::Index k = B.rows();
  const double kd = static_cast<double>(k);
  const double rounding = (2.0 * static_cast<double>(m + n) + 4.0 * std::pow(kd + 2.0, 1.5)) * kEps * fro;
  const double tol = std::max(delta, 2.0 * rounding);

  std::mt19937_64 rng(opts.seed);
  Eigen::VectorXd x = random_unit(rng, k);
  double log_upper = std::log(B.norm());  // log ||G^(2^j)||_F / 2^j, in units of fro^2
  B /= B.norm();
  double weight = 1.0;
  constexpr int kMaxSquarings = 80;
  for (int it = 1; it <= std::min(opts.max_iterations, kMaxSquarings); ++it) {
    Eigen::VectorXd y = B * x;
    for (int restart = 0; y.norm() <= 1e-3 * std::sqrt(kEps) && restart < 8; ++restart) {
      x = random_unit(rng, k);
      y = B * x;
    }
    const double lower = wide ? (Mn.transpose() * y.normalized()).norm() : (Mn * y.normalized()).norm();
    const double upper = std::exp(0.5 * log_upper);
    const double cert = (upper - lower) * fro + rounding;
    if (cert <= tol) return {lower * fro, cert, it};

    Eigen::MatrixXd next = B * B;
    next = 0.5 * (next + next.transpose()).eval();
    const double nn = next.norm();
    if (!(nn > 0.0) || !std::isfinite(nn)) break;
    weight *= 0.5;
    log_upper += weight * std::log(nn);
    B = next / nn;
  }
  throw OracleFailure("largest_singular_value: iteration budget exhausted before certification");
}

SpectralEstimate smallest_eigenvalue(const Eigen::MatrixXd& M, double delta,
                                     const SpectralOptions& opts) {
  require_finite(M, "smallest_eigenvalue");
  if (M.rows() != M.cols()) throw PreconditionError("smallest_eigenvalue: matrix must be square");
  if (!(delta > 0.0)) throw PreconditionError("smallest_eigenvalue: delta must be positive");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw PreconditionError("smallest_eigenvalue: matrix is not symmetric");
  const Eigen::MatrixXd S = 0.5 * (M + M.transpose());

  // The shift error enters twice when M is close to a multiple of I, so the
  // first estimate gets half of the second one's budget.
  const SpectralEstimate top = largest_singular_value(S, 0.25 * delta, opts);
  Eigen::MatrixXd shifted = S;
  shifted.diagonal().array() -= top.value;
  const SpectralEstimate gap = largest_singular_value(shifted, 0.5 * delta, opts);
  return {top.value - gap.value, 2.0 * top.certified_error + gap.certified_error,
          top.iterations_used + gap.iterations_used};
}

SvdResult svd(const Eigen::MatrixXd& M, int max_sweeps) {
  require_finite(M, "svd");
  const bool transposed = M.rows() < M.cols();
  Eigen::MatrixXd A = transposed ? Eigen::MatrixXd(M.transpose()) : M;
  const Eigen::Index p = A.rows(), q = A.cols();
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(q, q);

  const double tol = static_cast<double>(p) * kEps;
  bool converged = (q <= 1);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < q; ++i) {
      for (Eigen::Index j = i + 1; j < q; ++j) {
        const double alpha = A.col(i).squaredNorm();
        const double beta = A.col(j).squaredNorm();
        const double gamma = A.col(i).dot(A.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index k = 0; k < p; ++k) {
          const double ai = A(k, i), aj = A(k, j);
          A(k, i) = c * ai - s * aj;
          A(k, j) = s * ai + c * aj;
        }
        for (Eigen::Index k = 0; k < q; ++k) {
          const double vi = V(k, i), vj = V(k, j);
          V(k, i) = c * vi - s * vj;
          V(k, j) = s * vi + c * vj;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw OracleFailure("svd: Jacobi sweep budget exhausted");

  Eigen::VectorXd norms(q);
  for (Eigen::Index k = 0; k < q; ++k) norms(k) = A.col(k).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(q));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return norms(a) > norms(b); });

  SvdResult out;
  out.sigma.resize(q);
  out.V.resize(q, q);
  out.U = Eigen::MatrixXd::Zero(p, p);
  const double smax = q > 0 ? norms(order[0]) : 0.0;
  const double tiny = static_cast<double>(p) * kEps * smax;
  std::vector<bool> filled(static_cast<std::size_t>(p), false);
  for (Eigen::Index k = 0; k < q; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.sigma(k) = norms(src);
    out.V.col(k) = V.col(src);
    if (norms(src) > tiny && norms(src) > 0.0) {
      out.U.col(k) = A.col(src) / norms(src);
      filled[static_cast<std::size_t>(k)] = true;
    }
  }
  // Complete U to an orthonormal basis by Gram-Schmidt against the unit vectors.
  Eigen::Index next_unit = 0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (filled[static_cast<std::size_t>(k)]) continue;
    while (next_unit < p) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(p, next_unit++);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < p; ++j)
          if (filled[static_cast<std::size_t>(j)]) e -= out.U.col(j).dot(e) * out.U.col(j);
      const double ne = e.norm();
      if (ne > 1e-8) {
        out.U.col(k) = e / ne;
        filled[static_cast<std::size_t>(k)] = true;
        break;
      }
    }
    if (!filled[static_cast<std::size_t>(k)]) throw OracleFailure("svd: basis completion failed");
  }
  if (transposed) std::swap(out.U, out.V);
  return out;
}

}  // namespace gaugeopt
