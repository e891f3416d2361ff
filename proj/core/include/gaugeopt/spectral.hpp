#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace gaugeopt {

struct SpectralEstimate {
  double value = 0.0;
  double certified_error = 0.0;
  int iterations_used = 0;
};

struct SpectralOptions {
  std::uint64_t seed = 0x5eed5eedULL;
  int max_iterations = 80;
};

// Power iteration on the Gram matrix with repeated squaring. The returned value
// never exceeds sigma_1(M) beyond rounding; the certificate is the gap to the
// Frobenius upper bound on sigma_1, plus a rounding allowance. Requests below
// the rounding floor are clamped to it. max_iterations caps the squarings.
SpectralEstimate largest_singular_value(const Eigen::MatrixXd& M, double delta,
                                        const SpectralOptions& opts = {});

// lambda_min(M) = s - sigma_1(M - s I) with s an estimate of sigma_1(M).
SpectralEstimate smallest_eigenvalue(const Eigen::MatrixXd& M, double delta,
                                     const SpectralOptions& opts = {});

struct SvdResult {
  Eigen::MatrixXd U;      // m x m
  Eigen::VectorXd sigma;  // min(m, n), nonincreasing
  Eigen::MatrixXd V;      // n x n
};

// One-sided Jacobi. U and V are square and orthogonal.
SvdResult svd(const Eigen::MatrixXd& M, int max_sweeps = 80);

}  // namespace gaugeopt
