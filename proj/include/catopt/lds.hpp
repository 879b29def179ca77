#pragma once

#include <vector>

#include "catopt/objective.hpp"

namespace catopt {

// Maximum-likelihood recovery of a time-invariant linear dynamical system
//
//   h_{t+1} = A h_t + B u_t + xi_t        xi_t ~ N(0, sigma)^d
//   x_t     = h_t + nu_t                  nu_t ~ N(0, 1)^d
//
// from observations x_1..x_T and controls u_1..u_T:
//
//   f(A, B, h) = sum_{t=1..T} ||h_{t+1} - A h_t - B u_t||^2 / sigma^2
//              + sum_{t=1..T} ||x_t - h_t||^2.
//
// Both sums run over t = 1..T; the hidden state has one more entry h_{T+1}
// than there are observations, so the final hidden state is constrained
// only through the dynamics term.
//
// Decision-variable layout (row-major block order, dimension 2 d^2 + (T+1) d):
//   [ A row-major | B row-major | h_1 ... h_{T+1} ]
class LdsProblem final : public ObjectiveFunction {
 public:
  LdsProblem(std::vector<Vector> observations, std::vector<Vector> controls,
             double sigma, std::string name = "lds");

  Index dimension() const override;
  const std::string& name() const override { return name_; }

  double value(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;

  Index horizon() const { return static_cast<Index>(observations_.size()); }
  Index hidden_dim() const { return d_; }
  double sigma() const { return sigma_; }
  const std::vector<Vector>& observations() const { return observations_; }
  const std::vector<Vector>& controls() const { return controls_; }

  // Packs (A, B, h_1..h_{T+1}) into the flat layout above.
  Vector pack(const Matrix& a, const Matrix& b, const std::vector<Vector>& h) const;

  // Canonical start point: A = 0.5 I, B = 0, h_t = x_t (h_{T+1} = x_T).
  Vector start_point() const;

 private:
  Matrix unpack_a(const Vector& z) const;
  Matrix unpack_b(const Vector& z) const;
  Vector hidden(const Vector& z, Index t) const;  // h_t, t in 1..T+1

  std::vector<Vector> observations_;  // x_1..x_T
  std::vector<Vector> controls_;      // u_1..u_T
  double sigma_;
  Index d_;
  std::string name_;
};

// A synthetically generated instance together with the simulated ground
// truth, kept so tests can check the generator against the objective.
struct LdsInstance {
  std::shared_ptr<const LdsProblem> problem;
  Matrix a_true;
  Matrix b_true;
  std::vector<Vector> h_true;        // h_1..h_{T+1}
  std::vector<Vector> process_noise; // xi_1..xi_T
  std::vector<Vector> obs_noise;     // nu_1..nu_T
};

// Draw order per instance (documented for reproducibility): B row-major,
// the d diagonal entries of D ~ U[0.9, 0.99), W row-major for the QR-based
// orthogonal factor of A = Q' D Q, h_1, then per step t: u_t, xi_t, nu_t.
LdsInstance generate_lds_instance(Index horizon, Index hidden_dim, double sigma,
                                  std::uint64_t seed);

}  // namespace catopt
