// Copyright 2026 The ravine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RAVINE_PROBLEMS_HPP_
#define RAVINE_PROBLEMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ravine/errors.hpp"
#include "ravine/linalg.hpp"

namespace ravine {

enum class ProblemKind { quadratic, logistic_regression, least_squares };

inline const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::logistic_regression: return "logistic";
    case ProblemKind::least_squares: return "least_squares";
  }
  return "?";
}

/// A convex objective with an L-Lipschitz gradient and a known solution set.
///
/// Quadratic and least-squares objectives share one representation,
/// f(x) = 1/2 x'Hx + c'x + c0, which gives exact gaps, a closed-form prox,
/// and an exact projector onto the (possibly affine) solution set through
/// the pseudo-inverse of H. Logistic regression carries a unique minimizer
/// computed once by Newton's method.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class Problem {
 public:
  /// f(x) = 1/2 x'Ax + b'x with A symmetric positive semidefinite and
  /// b in range(A).
  static Problem quadratic(Matrix a, Vector b) {
    if (a.rows() != a.cols()) throw ContractViolation("quadratic: A must be square");
    require_dim(b, a.rows(), "quadratic: b");
    if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) {
      throw ContractViolation("quadratic: A must be symmetric");
    }
    Problem p(ProblemKind::quadratic, a.rows());
    p.hess_ = 0.5 * (a + a.transpose());
    p.lin_ = std::move(b);
    p.const_ = 0.0;
    p.finish_quadratic_form();
    return p;
  }

  /// f(x) = 1/2 ||Xx - y||^2. Rank-deficient designs give an affine
  /// solution set, handled through the projector.
  static Problem least_squares(const Matrix& design, const Vector& targets) {
    require_dim(targets, design.rows(), "least_squares: targets");
    Problem p(ProblemKind::least_squares, design.cols());
    p.hess_ = design.transpose() * design;
    p.lin_ = -(design.transpose() * targets);
    p.const_ = 0.5 * targets.squaredNorm();
    p.data_ = design;
    p.labels_ = targets;
    p.finish_quadratic_form();
    return p;
  }

  /// f(x) = sum_i log(1 + exp(-y_i <a_i, x>)) + ridge/2 ||x||^2 with labels
  /// in {-1, +1}. L is bounded by ||X'X||_2 / 4 + ridge.
  static Problem logistic_regression(Matrix design, Vector labels, double ridge) {
    require_dim(labels, design.rows(), "logistic: labels");
    if (ridge < 0.0) throw ContractViolation("logistic: ridge must be >= 0");
    for (Index i = 0; i < labels.size(); ++i) {
      if (labels[i] != 1.0 && labels[i] != -1.0) {
        throw ContractViolation("logistic: labels must be -1 or +1");
      }
    }
    Problem p(ProblemKind::logistic_regression, design.cols());
    p.data_ = std::move(design);
    p.labels_ = std::move(labels);
    p.ridge_ = ridge;
    const Matrix gram = p.data_.transpose() * p.data_;
    const EigenEstimate top = power_iteration(gram);
    p.lipschitz_ = top.value / 4.0 + ridge;
    p.solve_logistic();
    return p;
  }

  ProblemKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  double lipschitz() const { return lipschitz_; }
  double f_min() const { return f_min_; }
  /// A minimizer (the minimum-norm one when the solution set is affine).
  const std::optional<Vector>& x_star() const { return x_star_; }
  bool unique_minimizer() const { return unique_; }
  bool has_prox() const { return kind_ != ProblemKind::logistic_regression; }

  /// Hessian of the quadratic kinds; throws for logistic.
  const Matrix& hessian() const {
    if (kind_ == ProblemKind::logistic_regression) {
      throw UnsupportedOperation("hessian matrix only stored for quadratic kinds");
    }
    return hess_;
  }

  double evaluate(const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "evaluate");
    if (is_quadratic_form()) return 0.5 * x.dot(hess_ * x) + lin_.dot(x) + const_;
    const Vector margins = labels_.cwiseProduct(data_ * x);
    double sum = 0.0;
    for (Index i = 0; i < margins.size(); ++i) sum += softplus(-margins[i]);
    return sum + 0.5 * ridge_ * x.squaredNorm();
  }

  Vector gradient(const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "gradient");
    if (is_quadratic_form()) return hess_ * x + lin_;
    const Vector margins = labels_.cwiseProduct(data_ * x);
    Vector weights(margins.size());
    for (Index i = 0; i < margins.size(); ++i) {
      weights[i] = -labels_[i] * sigmoid(-margins[i]);
    }
    return data_.transpose() * weights + ridge_ * x;
  }

  Vector hessian_vec(const Eigen::Ref<const Vector>& x,
                     const Eigen::Ref<const Vector>& v) const {
    require_dim(x, dim_, "hessian_vec: x");
    require_dim(v, dim_, "hessian_vec: v");
    if (is_quadratic_form()) return hess_ * v;
    const Vector margins = labels_.cwiseProduct(data_ * x);
    Vector curvature(margins.size());
    for (Index i = 0; i < margins.size(); ++i) {
      const double p = sigmoid(margins[i]);
      curvature[i] = p * (1.0 - p);
    }
    return data_.transpose() * curvature.cwiseProduct(data_ * v) + ridge_ * v;
  }

  /// argmin_u f(u) + ||u - x||^2 / (2s), i.e. (I + sH)^{-1}(x - s c).
  Vector prox(double s, const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "prox");
    if (!has_prox()) {
      throw UnsupportedOperation(std::string("prox unavailable for ") + to_string(kind_));
    }
    if (!(s > 0.0)) throw ContractViolation("prox: s must be positive");
    const Matrix system = Matrix::Identity(dim_, dim_) + s * hess_;
    return system.ldlt().solve(x - s * lin_);
  }

  /// Closest point of argmin f to x.
  Vector project_to_solutions(const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "project_to_solutions");
    if (!x_star_) throw UnsupportedOperation("no solution representation available");
    if (is_quadratic_form() && !unique_) return x - pinv_ * (hess_ * x + lin_);
    return *x_star_;
  }

  double distance_to_solutions(const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "distance_to_solutions");
    if (!x_star_) throw UnsupportedOperation("no solution representation available");
    if (is_quadratic_form() && !unique_) return (pinv_ * (hess_ * x + lin_)).norm();
    return (x - *x_star_).norm();
  }

  /// f(x) - min f. Quadratic kinds use 1/2 (x - x*)'H(x - x*), which does
  /// not cancel catastrophically near the minimum.
  double gap(const Eigen::Ref<const Vector>& x) const {
    require_dim(x, dim_, "gap");
    if (is_quadratic_form()) {
      const Vector d = x - *x_star_;
      return std::max(0.5 * d.dot(hess_ * d), 0.0);
    }
    return std::max(evaluate(x) - f_min_, 0.0);
  }

 private:
  Problem(ProblemKind kind, Index dim) : kind_(kind), dim_(dim) {
    if (dim <= 0) throw ContractViolation("problem dimension must be positive");
  }

  bool is_quadratic_form() const { return kind_ != ProblemKind::logistic_regression; }

  static double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  static double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  void finish_quadratic_form() {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hess_);
    const Vector& lambda = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
    if (lambda.minCoeff() < -cutoff * 1e3) {
      throw ContractViolation("quadratic form is not positive semidefinite");
    }
    lipschitz_ = std::max(power_iteration(hess_).value, 0.0);
    Vector inv = Vector::Zero(dim_);
    Index rank = 0;
    for (Index i = 0; i < dim_; ++i) {
      if (lambda[i] > cutoff) {
        inv[i] = 1.0 / lambda[i];
        ++rank;
      }
    }
    pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    const Vector consistency = hess_ * (pinv_ * lin_) - lin_;
    if (consistency.norm() > 1e-8 * (lin_.norm() + 1.0)) {
      throw ContractViolation("objective is unbounded below (linear term outside range of H)");
    }
    x_star_ = -(pinv_ * lin_);
    unique_ = rank == dim_;
    f_min_ = 0.5 * x_star_->dot(hess_ * *x_star_) + lin_.dot(*x_star_) + const_;
  }

  void solve_logistic() {
    Vector x = Vector::Zero(dim_);
    for (int it = 0; it < 200; ++it) {
      const Vector g = gradient(x);
      if (g.norm() <= 1e-13 * std::max(1.0, static_cast<double>(data_.rows()))) break;
      const Vector margins = labels_.cwiseProduct(data_ * x);
      Vector curvature(margins.size());
      for (Index i = 0; i < margins.size(); ++i) {
        const double p = sigmoid(margins[i]);
        curvature[i] = p * (1.0 - p);
      }
      Matrix h = data_.transpose() * curvature.asDiagonal() * data_;
      h.diagonal().array() += ridge_;
      const Vector step = h.ldlt().solve(g);
      const double f0 = evaluate(x);
      double t = 1.0;
      // Near the minimizer the decrease is below the rounding of f; take the full step.
      const bool local = g.dot(step) <= 1e-12 * (1.0 + std::abs(f0));
      while (!local && t > 1e-12 && evaluate(x - t * step) > f0 - 1e-4 * t * g.dot(step)) t *= 0.5;
      x -= t * step;
      if (!x.allFinite() || x.norm() > 1e8) {
        throw NumericError("logistic: no finite minimizer (separable data without ridge?)");
      }
    }
    if (ridge_ == 0.0 && labels_.cwiseProduct(data_ * x).minCoeff() > 0.0) {
      throw NumericError("logistic: data are separable and ridge is 0, so no minimizer exists");
    }
    if (gradient(x).norm() > 1e-10) {
      throw NumericError("logistic: Newton solve did not reach a stationary point");
    }
    x_star_ = x;
    unique_ = true;
    f_min_ = evaluate(x);
  }

  ProblemKind kind_;
  Index dim_;
  double lipschitz_ = 0.0;
  double f_min_ = 0.0;
  std::optional<Vector> x_star_;
  bool unique_ = true;

  // quadratic form 1/2 x'Hx + c'x + c0
  Matrix hess_;
  Vector lin_;
  double const_ = 0.0;
  Matrix pinv_;

  // logistic data (also the raw least-squares design)
  Matrix data_;
  Vector labels_;
  double ridge_ = 0.0;
};

// Generators ---------------------------------------------------------------

/// Random orthogonal matrix from the QR factorization of a seeded Gaussian
/// matrix, with signs fixed so the result is a deterministic function of the
/// seed.
inline Matrix random_orthogonal(Index dim, std::uint64_t seed) {
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) g.col(j) = standard_normal(dim, mix_keys(seed, j));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Log-spaced spectrum from hi down to lo.
inline Vector log_spectrum(Index dim, double hi, double lo) {
  if (!(hi > 0.0 && lo > 0.0)) throw ContractViolation("log_spectrum: bounds must be positive");
  Vector out(dim);
  for (Index i = 0; i < dim; ++i) {
    const double frac = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    out[i] = hi * std::pow(lo / hi, frac);
  }
  return out;
}

/// A = Q diag(spectrum) Q' (Q = I when rotate is false), b = -A m.
inline Problem make_quadratic(const Vector& spectrum, const Vector& minimizer,
                              bool rotate, std::uint64_t seed) {
  const Index dim = spectrum.size();
  require_dim(minimizer, dim, "make_quadratic: minimizer");
  Matrix a = spectrum.asDiagonal();
  if (rotate) {
    const Matrix q = random_orthogonal(dim, seed);
    a = q * spectrum.asDiagonal() * q.transpose();
    a = 0.5 * (a + a.transpose());
  }
  Vector b = -(a * minimizer);
  return Problem::quadratic(std::move(a), std::move(b));
}

/// Gaussian features; labels from a random hyperplane with 10% flips so the
/// data are not separable.
inline Problem make_logistic(Index samples, Index dim, double ridge, std::uint64_t seed) {
  Matrix x(samples, dim);
  for (Index i = 0; i < samples; ++i) x.row(i) = standard_normal(dim, mix_keys(seed, i)).transpose();
  const Vector truth = standard_normal(dim, mix_keys(seed, 0xabcdefULL));
  std::mt19937_64 gen(mix_keys(seed, 0x1abe1ULL));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector labels(samples);
  for (Index i = 0; i < samples; ++i) {
    double label = x.row(i).dot(truth) >= 0.0 ? 1.0 : -1.0;
    if (unif(gen) < 0.1) label = -label;
    labels[i] = label;
  }
  return Problem::logistic_regression(std::move(x), std::move(labels), ridge);
}

/// Design of the given rank (rank < dim leaves a nontrivial kernel) with
/// Gaussian factors and Gaussian targets.
inline Problem make_least_squares(Index samples, Index dim, Index rank, std::uint64_t seed) {
  if (rank < 1 || rank > std::min(samples, dim)) {
    throw ContractViolation("make_least_squares: rank must be in [1, min(samples, dim)]");
  }
  Matrix left(samples, rank), right(rank, dim);
  for (Index j = 0; j < rank; ++j) left.col(j) = standard_normal(samples, mix_keys(seed, 2 * j));
  for (Index j = 0; j < rank; ++j) {
    right.row(j) = standard_normal(dim, mix_keys(seed, 2 * j + 1)).transpose();
  }
  const Matrix design = left * right / std::sqrt(static_cast<double>(samples));
  const Vector targets = standard_normal(samples, mix_keys(seed, 0x7a76e7ULL));
  return Problem::least_squares(design, targets);
}

}  // namespace ravine

#endif  // RAVINE_PROBLEMS_HPP_
