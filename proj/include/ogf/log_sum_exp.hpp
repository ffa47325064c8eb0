#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace ogf {

/// g(x) = log sum_k exp(b_k + a_k . x_S), where S is a small set of variable
/// indices (the support). A single term is an affine function; an empty
/// function evaluates to zero.
///
/// Derivatives with p = softmax(A x_S + b):
///   grad g = A^T p,   hess g = A^T (diag(p) - p p^T) A.
template <typename Scalar>
class LogSumExp {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Index = Eigen::Index;

  LogSumExp() = default;
  LogSumExp(std::vector<Index> support, Matrix exponents, Vector log_coeffs)
      : support_(std::move(support)),
        exponents_(std::move(exponents)),
        log_coeffs_(std::move(log_coeffs)) {}

  /// Convenience: terms given as (coefficient, {(var, exponent), ...}).
  /// Coefficients must be positive; zero coefficients are dropped.
  struct Term {
    Scalar coeff;
    std::vector<std::pair<Index, Scalar>> powers;
  };
  static LogSumExp from_terms(const std::vector<Term>& terms) {
    std::vector<Index> support;
    for (const Term& t : terms) {
      if (!(t.coeff > Scalar(0))) continue;
      for (const auto& [var, pw] : t.powers) {
        if (std::find(support.begin(), support.end(), var) == support.end()) support.push_back(var);
      }
    }
    std::sort(support.begin(), support.end());
    std::vector<const Term*> kept;
    for (const Term& t : terms) {
      if (t.coeff > Scalar(0)) kept.push_back(&t);
    }
    Matrix a = Matrix::Zero(static_cast<Index>(kept.size()), static_cast<Index>(support.size()));
    Vector b(static_cast<Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) {
      b[static_cast<Index>(k)] = std::log(kept[k]->coeff);
      for (const auto& [var, pw] : kept[k]->powers) {
        const auto pos = std::lower_bound(support.begin(), support.end(), var) - support.begin();
        a(static_cast<Index>(k), pos) += pw;
      }
    }
    return LogSumExp(std::move(support), std::move(a), std::move(b));
  }

  /// The affine function c0 + sum_j w_j x_{v_j}.
  static LogSumExp affine(const std::vector<std::pair<Index, Scalar>>& weights, Scalar c0) {
    std::vector<Index> support;
    Matrix a(1, static_cast<Index>(weights.size()));
    for (std::size_t j = 0; j < weights.size(); ++j) {
      support.push_back(weights[j].first);
      a(0, static_cast<Index>(j)) = weights[j].second;
    }
    Vector b(1);
    b[0] = c0;
    return LogSumExp(std::move(support), std::move(a), std::move(b));
  }

  bool empty() const { return log_coeffs_.size() == 0; }
  Index terms() const { return log_coeffs_.size(); }
  const std::vector<Index>& support() const { return support_; }
  const Matrix& exponents() const { return exponents_; }
  const Vector& log_coeffs() const { return log_coeffs_; }

  Vector local(const Vector& x) const {
    Vector xs(static_cast<Index>(support_.size()));
    for (std::size_t j = 0; j < support_.size(); ++j) xs[static_cast<Index>(j)] = x[support_[j]];
    return xs;
  }

  Scalar value(const Vector& x) const {
    if (empty()) return Scalar(0);
    const Vector y = exponents_ * local(x) + log_coeffs_;
    const Scalar ymax = y.maxCoeff();
    return ymax + std::log((y.array() - ymax).exp().sum());
  }

  struct Local {
    Scalar value;
    Vector grad;  // with respect to the support variables
    Matrix hess;
  };

  Local local_derivatives(const Vector& x, bool with_hessian = true) const {
    Local out;
    if (empty()) {
      out.value = Scalar(0);
      return out;
    }
    const Vector y = exponents_ * local(x) + log_coeffs_;
    const Scalar ymax = y.maxCoeff();
    Vector p = (y.array() - ymax).exp().matrix();
    const Scalar sum = p.sum();
    p /= sum;
    out.value = ymax + std::log(sum);
    out.grad = exponents_.transpose() * p;
    if (with_hessian) {
      out.hess = exponents_.transpose() * p.asDiagonal() * exponents_ -
                 out.grad * out.grad.transpose();
    }
    return out;
  }

  /// Full-length gradient, for checks.
  Vector gradient(const Vector& x) const {
    Vector g = Vector::Zero(x.size());
    if (empty()) return g;
    const Local d = local_derivatives(x, false);
    for (std::size_t j = 0; j < support_.size(); ++j) g[support_[j]] = d.grad[static_cast<Index>(j)];
    return g;
  }

  template <typename Other>
  LogSumExp<Other> cast() const {
    return LogSumExp<Other>(support_, exponents_.template cast<Other>(),
                            log_coeffs_.template cast<Other>());
  }

 private:
  std::vector<Index> support_;
  Matrix exponents_;
  Vector log_coeffs_;
};

}  // namespace ogf
