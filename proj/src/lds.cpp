#include "catopt/lds.hpp"

#include <Eigen/QR>

#include "catopt/rng.hpp"

namespace catopt {

LdsProblem::LdsProblem(std::vector<Vector> observations, std::vector<Vector> controls,
                       double sigma, std::string name)
    : observations_(std::move(observations)),
      controls_(std::move(controls)),
      sigma_(sigma),
      name_(std::move(name)) {
  if (observations_.size() < 2 || observations_.size() != controls_.size()) {
    throw ParameterError("LdsProblem: need T >= 2 observations and matching controls");
  }
  if (sigma_ <= 0.0) throw ParameterError("LdsProblem: sigma must be positive");
  d_ = observations_.front().size();
  if (d_ < 1) throw ParameterError("LdsProblem: hidden dimension must be >= 1");
  for (const Vector& v : observations_) {
    if (v.size() != d_ || !is_finite(v)) throw ParameterError("LdsProblem: bad observation");
  }
  for (const Vector& v : controls_) {
    if (v.size() != d_ || !is_finite(v)) throw ParameterError("LdsProblem: bad control");
  }
}

Index LdsProblem::dimension() const {
  const Index t = horizon();
  return 2 * d_ * d_ + (t + 1) * d_;
}

Matrix LdsProblem::unpack_a(const Vector& z) const {
  Matrix a(d_, d_);
  for (Index i = 0; i < d_; ++i)
    for (Index j = 0; j < d_; ++j) a(i, j) = z[i * d_ + j];
  return a;
}

Matrix LdsProblem::unpack_b(const Vector& z) const {
  const Index off = d_ * d_;
  Matrix b(d_, d_);
  for (Index i = 0; i < d_; ++i)
    for (Index j = 0; j < d_; ++j) b(i, j) = z[off + i * d_ + j];
  return b;
}

Vector LdsProblem::hidden(const Vector& z, Index t) const {
  return z.segment(2 * d_ * d_ + (t - 1) * d_, d_);
}

Vector LdsProblem::pack(const Matrix& a, const Matrix& b,
                        const std::vector<Vector>& h) const {
  const Index t = horizon();
  if (a.rows() != d_ || a.cols() != d_ || b.rows() != d_ || b.cols() != d_ ||
      static_cast<Index>(h.size()) != t + 1) {
    throw ParameterError("LdsProblem::pack: shape mismatch");
  }
  Vector z(dimension());
  for (Index i = 0; i < d_; ++i)
    for (Index j = 0; j < d_; ++j) z[i * d_ + j] = a(i, j);
  for (Index i = 0; i < d_; ++i)
    for (Index j = 0; j < d_; ++j) z[d_ * d_ + i * d_ + j] = b(i, j);
  for (Index s = 0; s <= t; ++s) z.segment(2 * d_ * d_ + s * d_, d_) = h[s];
  return z;
}

Vector LdsProblem::start_point() const {
  const Index t = horizon();
  std::vector<Vector> h(t + 1);
  for (Index s = 0; s < t; ++s) h[s] = observations_[s];
  h[t] = observations_[t - 1];
  return pack(0.5 * Matrix::Identity(d_, d_), Matrix::Zero(d_, d_), h);
}

double LdsProblem::value(const Vector& z) const {
  const Index t_end = horizon();
  const Matrix a = unpack_a(z);
  const Matrix b = unpack_b(z);
  const double w = 1.0 / (sigma_ * sigma_);
  double f = 0.0;
  for (Index t = 1; t <= t_end; ++t) {
    const Vector e = hidden(z, t + 1) - a * hidden(z, t) - b * controls_[t - 1];
    const Vector o = observations_[t - 1] - hidden(z, t);
    f += w * e.squaredNorm() + o.squaredNorm();
  }
  return f;
}

Vector LdsProblem::gradient(const Vector& z) const {
  const Index t_end = horizon();
  const Matrix a = unpack_a(z);
  const Matrix b = unpack_b(z);
  const double w = 2.0 / (sigma_ * sigma_);

  Matrix ga = Matrix::Zero(d_, d_);
  Matrix gb = Matrix::Zero(d_, d_);
  std::vector<Vector> gh(t_end + 1, Vector::Zero(d_));

  for (Index t = 1; t <= t_end; ++t) {
    const Vector ht = hidden(z, t);
    const Vector& ut = controls_[t - 1];
    const Vector e = hidden(z, t + 1) - a * ht - b * ut;
    ga.noalias() -= w * e * ht.transpose();
    gb.noalias() -= w * e * ut.transpose();
    gh[t - 1].noalias() -= w * (a.transpose() * e);
    gh[t].noalias() += w * e;
    gh[t - 1] -= 2.0 * (observations_[t - 1] - ht);
  }
  return pack(ga, gb, gh);
}

Matrix LdsProblem::hessian(const Vector& z) const {
  const Index t_end = horizon();
  const Index n = dimension();
  const Matrix a = unpack_a(z);
  const Matrix b = unpack_b(z);
  const double w = 2.0 / (sigma_ * sigma_);
  const Index ha = 0;            // A block offset
  const Index hb = d_ * d_;      // B block offset
  const Index hh = 2 * d_ * d_;  // hidden-state block offset

  Matrix h = Matrix::Zero(n, n);

  // Data Gram matrices shared by the (A, B) blocks.
  Matrix s_hh = Matrix::Zero(d_, d_);
  Matrix s_hu = Matrix::Zero(d_, d_);
  Matrix s_uu = Matrix::Zero(d_, d_);
  for (Index t = 1; t <= t_end; ++t) {
    const Vector ht = hidden(z, t);
    const Vector& ut = controls_[t - 1];
    s_hh.noalias() += ht * ht.transpose();
    s_hu.noalias() += ht * ut.transpose();
    s_uu.noalias() += ut * ut.transpose();
  }

  // d2f / dA dA, dA dB, dB dB: block-diagonal over the output index i.
  for (Index i = 0; i < d_; ++i) {
    for (Index j = 0; j < d_; ++j) {
      for (Index l = 0; l < d_; ++l) {
        h(ha + i * d_ + j, ha + i * d_ + l) = w * s_hh(j, l);
        h(ha + i * d_ + j, hb + i * d_ + l) = w * s_hu(j, l);
        h(hb + i * d_ + j, hb + i * d_ + l) = w * s_uu(j, l);
      }
    }
  }

  // Cross blocks with the hidden states. With e_t = h_{t+1} - A h_t - B u_t:
  //   d2f / dA_ij dh_s^m = w ( A_im h_s^j [s<=T] - 1{m=i} h_{s-1}^j [s>=2]
  //                            - 1{m=j} e_s^i [s<=T] )
  //   d2f / dB_ij dh_s^m = w ( A_im u_s^j [s<=T] - 1{m=i} u_{s-1}^j [s>=2] )
  for (Index t = 1; t <= t_end; ++t) {
    const Vector ht = hidden(z, t);
    const Vector& ut = controls_[t - 1];
    const Vector e = hidden(z, t + 1) - a * ht - b * ut;
    for (Index i = 0; i < d_; ++i) {
      for (Index j = 0; j < d_; ++j) {
        const Index ra = ha + i * d_ + j;
        const Index rb = hb + i * d_ + j;
        for (Index m = 0; m < d_; ++m) {
          // s = t contributions (the A_im and e terms)
          h(ra, hh + (t - 1) * d_ + m) += w * a(i, m) * ht[j];
          h(rb, hh + (t - 1) * d_ + m) += w * a(i, m) * ut[j];
          // s = t+1 contributions (the 1{m=i} terms)
        }
        h(ra, hh + (t - 1) * d_ + j) -= w * e[i];
        h(ra, hh + t * d_ + i) -= w * ht[j];
        h(rb, hh + t * d_ + i) -= w * ut[j];
      }
    }
  }

  // Hidden-state block: block tridiagonal. Each dynamics term contributes
  // A'A on (t,t), I on (t+1,t+1) and -A' on (t,t+1); the observation term
  // adds 2 I on (t,t) for t <= T.
  const Matrix ata = a.transpose() * a;
  for (Index t = 1; t <= t_end; ++t) {
    const Index bt = hh + (t - 1) * d_;
    const Index bt1 = hh + t * d_;
    for (Index i = 0; i < d_; ++i) {
      for (Index j = 0; j < d_; ++j) {
        h(bt + i, bt + j) += w * ata(i, j);
        h(bt + i, bt1 + j) -= w * a(j, i);  // -A' block
      }
      h(bt1 + i, bt1 + i) += w;
      h(bt + i, bt + i) += 2.0;
    }
  }

  // Everything above filled the upper-right cross blocks and both halves of
  // the symmetric diagonal blocks; mirror the strict upper triangle down,
  // then back up to make the result exactly symmetric.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) h(j, i) = h(i, j);
  }
  mirror_lower_triangle(h);
  return h;
}

LdsInstance generate_lds_instance(Index horizon, Index hidden_dim, double sigma,
                                  std::uint64_t seed) {
  if (horizon < 2) throw ParameterError("generate_lds_instance: horizon must be >= 2");
  if (hidden_dim < 1) throw ParameterError("generate_lds_instance: hidden_dim must be >= 1");
  if (sigma <= 0.0) throw ParameterError("generate_lds_instance: sigma must be positive");

  const Index d = hidden_dim;
  const Index t_end = horizon;
  Rng rng(seed);

  Matrix b(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) b(i, j) = rng.normal();

  Vector diag(d);
  for (Index i = 0; i < d; ++i) diag[i] = rng.uniform(0.9, 0.99);

  Matrix w(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) w(i, j) = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(w).householderQ();
  const Matrix a = q.transpose() * diag.asDiagonal() * q;

  std::vector<Vector> h(t_end + 1), x(t_end), u(t_end), xi(t_end), nu(t_end);
  h[0] = Vector(d);
  for (Index i = 0; i < d; ++i) h[0][i] = rng.normal();

  for (Index t = 0; t < t_end; ++t) {
    u[t] = Vector(d);
    xi[t] = Vector(d);
    nu[t] = Vector(d);
    for (Index i = 0; i < d; ++i) u[t][i] = rng.normal();
    for (Index i = 0; i < d; ++i) xi[t][i] = rng.normal(sigma);
    for (Index i = 0; i < d; ++i) nu[t][i] = rng.normal();
    h[t + 1] = a * h[t] + b * u[t] + xi[t];
    x[t] = h[t] + nu[t];
  }

  LdsInstance inst;
  inst.problem = std::make_shared<LdsProblem>(x, u, sigma);
  inst.a_true = a;
  inst.b_true = b;
  inst.h_true = std::move(h);
  inst.process_noise = std::move(xi);
  inst.obs_noise = std::move(nu);
  return inst;
}

}  // namespace catopt
