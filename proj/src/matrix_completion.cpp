#include "catopt/matrix_completion.hpp"

#include <numeric>

#include "catopt/rng.hpp"

namespace catopt {

MatrixCompletionProblem::MatrixCompletionProblem(
    Index n1, Index n2, Index rank, std::vector<std::pair<Index, Index>> omega,
    std::vector<double> observed, double lambda1, double lambda2, std::string name)
    : n1_(n1),
      n2_(n2),
      rank_(rank),
      omega_(std::move(omega)),
      observed_(std::move(observed)),
      lambda1_(lambda1),
      lambda2_(lambda2),
      name_(std::move(name)) {
  if (n1_ < 1 || n2_ < 1) throw ParameterError("MatrixCompletionProblem: empty grid");
  if (rank_ < 1 || rank_ >= std::min(n1_, n2_)) {
    throw ParameterError("MatrixCompletionProblem: rank must satisfy 1 <= rank < min(n1, n2)");
  }
  if (omega_.empty() || omega_.size() != observed_.size()) {
    throw ParameterError("MatrixCompletionProblem: observations do not match Omega");
  }
  row_count_.assign(n1_, 0);
  col_count_.assign(n2_, 0);
  for (const auto& [i, j] : omega_) {
    if (i < 0 || i >= n1_ || j < 0 || j >= n2_) {
      throw ParameterError("MatrixCompletionProblem: index outside the grid");
    }
    ++row_count_[i];
    ++col_count_[j];
  }
  mu_ = std::accumulate(observed_.begin(), observed_.end(), 0.0) /
        static_cast<double>(observed_.size());
}

double MatrixCompletionProblem::residual(const Vector& z, std::size_t k) const {
  const auto [i, j] = omega_[k];
  const double pq = z.segment(p_offset() + i * rank_, rank_)
                        .dot(z.segment(q_offset() + j * rank_, rank_));
  return observed_[k] - mu_ - z[i] - z[n1_ + j] - pq;
}

double MatrixCompletionProblem::value(const Vector& z) const {
  double f = 0.0;
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto [i, j] = omega_[k];
    const double s = residual(z, k);
    f += s * s + lambda1_ * (z[i] * z[i] + z[n1_ + j] * z[n1_ + j]) +
         lambda2_ * (z.segment(p_offset() + i * rank_, rank_).squaredNorm() +
                     z.segment(q_offset() + j * rank_, rank_).squaredNorm());
  }
  return f;
}

Vector MatrixCompletionProblem::gradient(const Vector& z) const {
  Vector g = Vector::Zero(dimension());
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto [i, j] = omega_[k];
    const double s = residual(z, k);
    const auto pi = z.segment(p_offset() + i * rank_, rank_);
    const auto qj = z.segment(q_offset() + j * rank_, rank_);
    g[i] += -2.0 * s + 2.0 * lambda1_ * z[i];
    g[n1_ + j] += -2.0 * s + 2.0 * lambda1_ * z[n1_ + j];
    g.segment(p_offset() + i * rank_, rank_) += -2.0 * s * qj + 2.0 * lambda2_ * pi;
    g.segment(q_offset() + j * rank_, rank_) += -2.0 * s * pi + 2.0 * lambda2_ * qj;
  }
  return g;
}

Matrix MatrixCompletionProblem::hessian(const Vector& z) const {
  const Index n = dimension();
  Matrix h = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto [i, j] = omega_[k];
    const double s = residual(z, k);
    const Index pi0 = p_offset() + i * rank_;
    const Index qj0 = q_offset() + j * rank_;
    const auto pi = z.segment(pi0, rank_);
    const auto qj = z.segment(qj0, rank_);

    h(i, i) += 2.0 + 2.0 * lambda1_;
    h(n1_ + j, n1_ + j) += 2.0 + 2.0 * lambda1_;
    h(i, n1_ + j) += 2.0;

    for (Index a = 0; a < rank_; ++a) {
      h(i, pi0 + a) += 2.0 * qj[a];
      h(i, qj0 + a) += 2.0 * pi[a];
      h(n1_ + j, pi0 + a) += 2.0 * qj[a];
      h(n1_ + j, qj0 + a) += 2.0 * pi[a];
      for (Index c = 0; c < rank_; ++c) {
        h(pi0 + a, pi0 + c) += 2.0 * qj[a] * qj[c];
        h(qj0 + a, qj0 + c) += 2.0 * pi[a] * pi[c];
        h(pi0 + a, qj0 + c) += 2.0 * qj[a] * pi[c];
      }
      h(pi0 + a, pi0 + a) += 2.0 * lambda2_;
      h(qj0 + a, qj0 + a) += 2.0 * lambda2_;
      h(pi0 + a, qj0 + a) += -2.0 * s;
    }
  }
  // Only the upper-right halves of the cross blocks were filled; make the
  // matrix exactly symmetric.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) h(j, i) = h(i, j);
  }
  mirror_lower_triangle(h);
  return h;
}

McInstance generate_mc_instance(Index n1, Index n2, Index rank, double fill,
                                double lambda1, double lambda2, std::uint64_t seed) {
  if (n1 < 2 || n2 < 2) throw ParameterError("generate_mc_instance: grid must be at least 2 x 2");
  if (rank < 1 || rank >= std::min(n1, n2)) {
    throw ParameterError("generate_mc_instance: rank must satisfy 1 <= rank < min(n1, n2)");
  }
  if (!(fill > 0.0) || fill > 1.0) {
    throw ParameterError("generate_mc_instance: fill must lie in (0, 1]");
  }

  Rng rng(seed);
  const double mu = rng.normal();
  Vector row_off(n1), col_off(n2);
  for (Index i = 0; i < n1; ++i) row_off[i] = rng.normal();
  for (Index j = 0; j < n2; ++j) col_off[j] = rng.normal();
  Matrix p(n1, rank), q(n2, rank);
  for (Index i = 0; i < n1; ++i)
    for (Index a = 0; a < rank; ++a) p(i, a) = rng.normal();
  for (Index j = 0; j < n2; ++j)
    for (Index a = 0; a < rank; ++a) q(j, a) = rng.normal();

  Matrix d(n1, n2);
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      d(i, j) = mu + row_off[i] + col_off[j] + p.row(i).dot(q.row(j));

  std::vector<std::pair<Index, Index>> omega;
  for (Index i = 0; i < n1; ++i) {
    for (Index j = 0; j < n2; ++j) {
      if (rng.uniform() < fill) omega.emplace_back(i, j);
    }
  }
  if (omega.empty()) {
    for (Index i = 0; i < std::min(n1, n2); ++i) omega.emplace_back(i, i);
  }
  std::vector<double> observed(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    observed[k] = d(omega[k].first, omega[k].second);
  }

  auto problem = std::make_shared<MatrixCompletionProblem>(
      n1, n2, rank, omega, observed, lambda1, lambda2);

  // Start point: zero baseline offsets, small random factors. All-zero
  // factors would sit exactly on the P = Q = 0 saddle.
  Vector start = Vector::Zero(problem->dimension());
  const Index p0 = n1 + n2;
  for (Index i = 0; i < (n1 + n2) * rank; ++i) start[p0 + i] = rng.normal(0.1);

  McInstance inst;
  inst.problem = std::move(problem);
  inst.d_true = std::move(d);
  inst.start = std::move(start);
  return inst;
}

}  // namespace catopt
