#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sparsecut/error.hpp"

namespace sparsecut {

/// Absolute tolerance used for structural comparisons throughout the library.
inline constexpr double kTol = 1e-8;

/// One stored coefficient of a symmetric matrix. Only i <= j is kept; the
/// mirrored entry (j, i) carries the same value.
struct Triplet {
  int i = 0;
  int j = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// x^T Q x + c^T x + d with Q symmetric and stored upper-triangular.
struct QuadraticForm {
  std::vector<Triplet> Q;
  Eigen::VectorXd c;
  double d = 0.0;

  double evaluate(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense_Q(int n) const;
  bool operator==(const QuadraticForm& other) const;
};

/// min f_0(x) s.t. f_k(x) <= 0 (k = 1..m), lower <= x <= upper.
class QcqpInstance {
 public:
  QcqpInstance() = default;
  QcqpInstance(std::string name, int n, std::vector<QuadraticForm> forms, Eigen::VectorXd lower,
               Eigen::VectorXd upper);

  int n() const { return n_; }
  int m() const { return static_cast<int>(forms_.size()) - 1; }
  const std::string& name() const { return name_; }
  const QuadraticForm& objective() const { return forms_.front(); }
  const QuadraticForm& form(int k) const { return forms_.at(static_cast<std::size_t>(k)); }
  const std::vector<QuadraticForm>& forms() const { return forms_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  /// True iff every lower bound is nonnegative (enables the DNN machinery).
  bool nonneg() const;

  double objective_value(const Eigen::VectorXd& x) const { return objective().evaluate(x); }
  /// Largest constraint value max_k f_k(x) (or -inf when m = 0).
  double max_violation(const Eigen::VectorXd& x) const;
  bool is_feasible(const Eigen::VectorXd& x, double tol) const;

  bool operator==(const QcqpInstance& other) const;

 private:
  void normalize_and_validate();

  std::string name_;
  int n_ = 0;
  std::vector<QuadraticForm> forms_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Dense symmetric matrix with a single storage cell per symmetric pair.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);

  /// Takes the upper triangle of `dense`; throws unless `dense` is symmetric to `tol`.
  static SymMatrix from_dense(const Eigen::MatrixXd& dense, double tol = 1e-12);
  static SymMatrix identity(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& operator()(int i, int j) { return data_[index(i, j)]; }

  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t index(int i, int j) const;

  int dim_ = 0;
  std::vector<double> data_;
};

/// Canonical pair (i <= j) of the lifted matrix index set {0..n}^2.
struct Pair {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Pair&, const Pair&) = default;
};

/// The set E of structurally relevant entries of Y, stored as canonical pairs.
class SupportSet {
 public:
  /// Exactly the given pairs (canonicalized, deduplicated, sorted).
  SupportSet(int dim, std::span<const Pair> pairs);

  /// The given pairs plus the first row and the diagonal.
  static SupportSet with_mandated(int dim, std::span<const Pair> extra_pairs);

  /// Every pair of the (dim x dim) symmetric index set.
  static SupportSet full(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return pairs_.size(); }
  const std::vector<Pair>& pairs() const { return pairs_; }
  const Pair& pair(std::size_t k) const { return pairs_[k]; }

  bool contains(int i, int j) const { return find(i, j) >= 0; }
  /// True when the first row and the whole diagonal are present.
  bool has_mandated_pairs() const;
  /// Coordinate index of (i, j) or (j, i); -1 when outside E.
  int find(int i, int j) const;
  /// Weight of coordinate k in the symmetric inner product (1 diagonal, 2 otherwise).
  double weight(std::size_t k) const { return pairs_[k].i == pairs_[k].j ? 1.0 : 2.0; }

  bool operator==(const SupportSet& other) const { return dim_ == other.dim_ && pairs_ == other.pairs_; }

 private:
  int dim_ = 0;
  std::vector<Pair> pairs_;
  std::vector<int> lookup_;
};

using SupportPtr = std::shared_ptr<const SupportSet>;

/// A real value per canonical pair of a SupportSet.
class EVector {
 public:
  EVector() = default;
  explicit EVector(SupportPtr support);
  EVector(SupportPtr support, Eigen::VectorXd values);

  const SupportPtr& support() const { return support_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double at(int i, int j) const;
  void set(int i, int j, double v);

 private:
  SupportPtr support_;
  Eigen::VectorXd values_;
};

bool same_support(const SupportSet& a, const SupportSet& b);

SupportPtr build_support_set(const QcqpInstance& instance);

/// Symmetric inner product over E: off-diagonal pairs count twice.
double evec_inner(const EVector& c, const EVector& z);

EVector project_to_E(const SymMatrix& y, const SupportPtr& support);
EVector project_to_E(const Eigen::MatrixXd& y, const SupportPtr& support);

/// Zero-fill embedding of Z into the full (n+1) x (n+1) matrix.
SymMatrix embed_from_E(const EVector& z);

/// Homogenized coefficient matrix [[d, c^T/2], [c/2, Q]] of a quadratic form,
/// restricted to `support` (entries outside the support must be zero).
EVector homogenized(const QuadraticForm& form, const SupportPtr& support);

/// Y(x, xx^T) = [1 x^T; x xx^T].
Eigen::MatrixXd lift(const Eigen::VectorXd& x);

}  // namespace sparsecut
