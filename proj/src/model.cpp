#include "sparsecut/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace sparsecut {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::SupportMismatch: return "support mismatch";
    case ErrorKind::UnsupportedFeature: return "unsupported feature";
    case ErrorKind::MalformedInput: return "malformed input";
    case ErrorKind::SchemaViolation: return "schema violation";
    case ErrorKind::ModeViolation: return "mode violation";
    case ErrorKind::DegenerateGap: return "degenerate gap";
    case ErrorKind::Numerical: return "numerical error";
  }
  return "error";
}

// ---------------------------------------------------------------------------
// QuadraticForm

double QuadraticForm::evaluate(const Eigen::VectorXd& x) const {
  double v = d + c.dot(x);
  for (const auto& t : Q) {
    const double term = t.value * x[t.i] * x[t.j];
    v += t.i == t.j ? term : 2.0 * term;
  }
  return v;
}

Eigen::MatrixXd QuadraticForm::dense_Q(int n) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : Q) {
    m(t.i, t.j) = t.value;
    m(t.j, t.i) = t.value;
  }
  return m;
}

bool QuadraticForm::operator==(const QuadraticForm& other) const {
  return Q == other.Q && c.size() == other.c.size() && c == other.c && d == other.d;
}

// ---------------------------------------------------------------------------
// QcqpInstance

QcqpInstance::QcqpInstance(std::string name, int n, std::vector<QuadraticForm> forms,
                           Eigen::VectorXd lower, Eigen::VectorXd upper)
    : name_(std::move(name)), n_(n), forms_(std::move(forms)), lower_(std::move(lower)),
      upper_(std::move(upper)) {
  normalize_and_validate();
}

void QcqpInstance::normalize_and_validate() {
  if (n_ < 1) throw Error(ErrorKind::InvalidArgument, "instance needs at least one variable");
  if (forms_.empty()) throw Error(ErrorKind::InvalidArgument, "instance has no objective");
  if (lower_.size() != n_ || upper_.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "bound vectors must have length n");
  for (int i = 0; i < n_; ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
      throw Error(ErrorKind::UnsupportedFeature, "unbounded variable x" + std::to_string(i));
    if (lower_[i] > upper_[i])
      throw Error(ErrorKind::InvalidArgument, "lower bound exceeds upper bound for x" + std::to_string(i));
  }
  for (auto& form : forms_) {
    if (form.c.size() == 0) form.c = Eigen::VectorXd::Zero(n_);
    if (form.c.size() != n_) throw Error(ErrorKind::DimensionMismatch, "linear term must have length n");
    if (!form.c.allFinite() || !std::isfinite(form.d))
      throw Error(ErrorKind::SchemaViolation, "non-finite coefficient");
    // Triplets are contributions to symmetric entries: canonicalize, sum duplicates, drop zeros.
    std::map<std::pair<int, int>, double> merged;
    for (const auto& t : form.Q) {
      if (t.i < 0 || t.j < 0 || t.i >= n_ || t.j >= n_)
        throw Error(ErrorKind::DimensionMismatch, "quadratic coefficient index out of range");
      if (!std::isfinite(t.value)) throw Error(ErrorKind::SchemaViolation, "non-finite coefficient");
      merged[{std::min(t.i, t.j), std::max(t.i, t.j)}] += t.value;
    }
    form.Q.clear();
    for (const auto& [key, v] : merged)
      if (v != 0.0) form.Q.push_back({key.first, key.second, v});
  }
}

bool QcqpInstance::nonneg() const { return (lower_.array() >= 0.0).all(); }

double QcqpInstance::max_violation(const Eigen::VectorXd& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= m(); ++k) worst = std::max(worst, forms_[static_cast<std::size_t>(k)].evaluate(x));
  return worst;
}

bool QcqpInstance::is_feasible(const Eigen::VectorXd& x, double tol) const {
  for (int i = 0; i < n_; ++i)
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  return m() == 0 || max_violation(x) <= tol;
}

bool QcqpInstance::operator==(const QcqpInstance& other) const {
  return name_ == other.name_ && n_ == other.n_ && forms_ == other.forms_ && lower_ == other.lower_ &&
         upper_ == other.upper_;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {}

std::size_t SymMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Column-major packed upper triangle.
  return static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(i);
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& dense, double tol) {
  if (dense.rows() != dense.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
  if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw Error(ErrorKind::InvalidArgument, "matrix is not symmetric");
  SymMatrix out(static_cast<int>(dense.rows()));
  for (int j = 0; j < out.dim_; ++j)
    for (int i = 0; i <= j; ++i) out(i, j) = dense(i, j);
  return out;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i) out(i, i) = 1.0;
  return out;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int i = 0; i <= j; ++i) m(i, j) = m(j, i) = (*this)(i, j);
  return m;
}

// ---------------------------------------------------------------------------
// SupportSet

SupportSet::SupportSet(int dim, std::span<const Pair> pairs) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "support dimension must be positive");
  lookup_.assign(static_cast<std::size_t>(dim) * dim, -1);
  std::vector<Pair> all;
  all.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.i < 0 || p.j < 0 || p.i >= dim || p.j >= dim)
      throw Error(ErrorKind::DimensionMismatch, "support pair out of range");
    all.push_back({std::min(p.i, p.j), std::max(p.i, p.j)});
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  pairs_ = std::move(all);
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto [i, j] = pairs_[k];
    lookup_[static_cast<std::size_t>(i) * dim_ + j] = static_cast<int>(k);
    lookup_[static_cast<std::size_t>(j) * dim_ + i] = static_cast<int>(k);
  }
}

SupportSet SupportSet::with_mandated(int dim, std::span<const Pair> extra_pairs) {
  std::vector<Pair> all(extra_pairs.begin(), extra_pairs.end());
  for (int j = 0; j < dim; ++j) {
    all.push_back({0, j});
    all.push_back({j, j});
  }
  return SupportSet(dim, all);
}

bool SupportSet::has_mandated_pairs() const {
  for (int j = 0; j < dim_; ++j)
    if (!contains(0, j) || !contains(j, j)) return false;
  return true;
}

SupportSet SupportSet::full(int dim) {
  std::vector<Pair> pairs;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) pairs.push_back({i, j});
  return SupportSet(dim, pairs);
}

int SupportSet::find(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) return -1;
  return lookup_[static_cast<std::size_t>(i) * dim_ + j];
}

bool same_support(const SupportSet& a, const SupportSet& b) { return &a == &b || a == b; }

SupportPtr build_support_set(const QcqpInstance& instance) {
  std::vector<Pair> pairs;
  for (const auto& form : instance.forms())
    for (const auto& t : form.Q) pairs.push_back({t.i + 1, t.j + 1});
  return std::make_shared<const SupportSet>(SupportSet::with_mandated(instance.n() + 1, pairs));
}

// ---------------------------------------------------------------------------
// EVector

EVector::EVector(SupportPtr support)
    : support_(std::move(support)), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support_->size()))) {}

EVector::EVector(SupportPtr support, Eigen::VectorXd values)
    : support_(std::move(support)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != support_->size())
    throw Error(ErrorKind::DimensionMismatch, "E-vector value count differs from support size");
}

double EVector::at(int i, int j) const {
  const int k = support_->find(i, j);
  if (k < 0) throw Error(ErrorKind::SupportMismatch, "pair outside support");
  return values_[k];
}

void EVector::set(int i, int j, double v) {
  const int k = support_->find(i, j);
  if (k < 0) throw Error(ErrorKind::SupportMismatch, "pair outside support");
  values_[k] = v;
}

double evec_inner(const EVector& c, const EVector& z) {
  if (!c.support() || !z.support() || !same_support(*c.support(), *z.support()))
    throw Error(ErrorKind::SupportMismatch, "E-vectors live on different supports");
  const auto& s = *c.support();
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += s.weight(k) * c.values()[static_cast<Eigen::Index>(k)] *
                                                    z.values()[static_cast<Eigen::Index>(k)];
  return acc;
}

EVector project_to_E(const SymMatrix& y, const SupportPtr& support) {
  if (y.dim() != support->dim()) throw Error(ErrorKind::DimensionMismatch, "matrix and support dimensions differ");
  EVector out(support);
  for (std::size_t k = 0; k < support->size(); ++k) {
    const auto [i, j] = support->pair(k);
    out.values()[static_cast<Eigen::Index>(k)] = y(i, j);
  }
  return out;
}

EVector project_to_E(const Eigen::MatrixXd& y, const SupportPtr& support) {
  return project_to_E(SymMatrix::from_dense(y, 1e-9), support);
}

SymMatrix embed_from_E(const EVector& z) {
  const auto& s = *z.support();
  SymMatrix out(s.dim());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto [i, j] = s.pair(k);
    out(i, j) = z.values()[static_cast<Eigen::Index>(k)];
  }
  return out;
}

EVector homogenized(const QuadraticForm& form, const SupportPtr& support) {
  EVector out(support);
  out.set(0, 0, form.d);
  for (int i = 0; i < form.c.size(); ++i) out.set(0, i + 1, 0.5 * form.c[i]);
  for (const auto& t : form.Q) out.set(t.i + 1, t.j + 1, t.value);
  return out;
}

Eigen::MatrixXd lift(const Eigen::VectorXd& x) {
  Eigen::VectorXd h(x.size() + 1);
  h[0] = 1.0;
  h.tail(x.size()) = x;
  return h * h.transpose();
}

}  // namespace sparsecut
