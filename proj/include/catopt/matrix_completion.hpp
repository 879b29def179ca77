#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "catopt/objective.hpp"

namespace catopt {

// Regularized rank-r completion of a partially observed matrix D with a
// baseline estimate mu + r_i + c_j:
//
//   f(r, c, P, Q) = sum_{(i,j) in Omega} [ (D_ij - mu - r_i - c_j - p_i' q_j)^2
//                                          + lambda1 (r_i^2 + c_j^2)
//                                          + lambda2 (||p_i||^2 + ||q_j||^2) ]
//
// where mu is the mean of the observed entries, precomputed once and held
// fixed. The regularizers sit inside the sum over Omega, so a row observed
// n_i times is penalized n_i times.
//
// Decision-variable layout (row-major block order,
// dimension n1 + n2 + (n1 + n2) * rank):
//   [ r_1..r_n1 | c_1..c_n2 | P row-major | Q row-major ]
class MatrixCompletionProblem final : public ObjectiveFunction {
 public:
  MatrixCompletionProblem(Index n1, Index n2, Index rank,
                          std::vector<std::pair<Index, Index>> omega,
                          std::vector<double> observed, double lambda1,
                          double lambda2, std::string name = "matrix_completion");

  Index dimension() const override { return n1_ + n2_ + (n1_ + n2_) * rank_; }
  const std::string& name() const override { return name_; }

  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;

  Index rows() const { return n1_; }
  Index cols() const { return n2_; }
  Index rank() const { return rank_; }
  double mu() const { return mu_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  const std::vector<std::pair<Index, Index>>& omega() const { return omega_; }

 private:
  double residual(const Vector& z, std::size_t k) const;

  Index p_offset() const { return n1_ + n2_; }
  Index q_offset() const { return n1_ + n2_ + n1_ * rank_; }

  Index n1_, n2_, rank_;
  std::vector<std::pair<Index, Index>> omega_;
  std::vector<double> observed_;
  double lambda1_, lambda2_;
  double mu_;
  std::vector<Index> row_count_, col_count_;
  std::string name_;
};

struct McInstance {
  std::shared_ptr<const MatrixCompletionProblem> problem;
  Matrix d_true;  // fully observed ground-truth matrix
  Vector start;   // canonical start point (r = c = 0, small random factors)
};

// Ground truth D = mu 1 + row-offsets + col-offsets + low-rank product with
// standard-normal factors; each (i, j) joins Omega independently with
// probability `fill`; an empty Omega falls back to the diagonal indices.
//
// Draw order: mu, row offsets, col offsets, P* row-major, Q* row-major,
// one uniform per (i, j) row-major for Omega, then the start-point factors
// P0, Q0 ~ N(0, 0.1) row-major.
McInstance generate_mc_instance(Index n1, Index n2, Index rank, double fill,
                                double lambda1, double lambda2, std::uint64_t seed);

}  // namespace catopt
