#include "qklab/tensor.hpp"

#include <cmath>

namespace qklab {

JetMatrix JetMatrix::identity(int n) {
  JetMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Jet2(1.0);
  return m;
}

JetMatrix JetMatrix::from_values(const Eigen::MatrixXd& v) {
  JetMatrix m(static_cast<int>(v.rows()), static_cast<int>(v.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = Jet2(v(i, j));
  return m;
}

Eigen::MatrixXd JetMatrix::values() const {
  Eigen::MatrixXd v(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) v(i, j) = (*this)(i, j).value();
  return v;
}

JetMatrix JetMatrix::partial(int k) const {
  JetMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    m.data_[i] = data_[i].dim() == 0 ? Jet2(0.0) : qklab::partial(data_[i], k);
  }
  return m;
}

JetMatrix JetMatrix::transpose() const {
  JetMatrix m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

JetMatrix& JetMatrix::operator+=(const JetMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw ArgumentError("matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

JetMatrix& JetMatrix::operator-=(const JetMatrix& o) {
  if (o.rows_ != rows_ || o.cols_ != cols_) throw ArgumentError("matrix shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

JetMatrix& JetMatrix::operator*=(const Jet2& s) {
  for (auto& x : data_) x *= s;
  return *this;
}

JetMatrix operator+(JetMatrix a, const JetMatrix& b) { return a += b; }
JetMatrix operator-(JetMatrix a, const JetMatrix& b) { return a -= b; }
JetMatrix operator*(const Jet2& s, JetMatrix a) { return a *= s; }

JetMatrix operator*(const JetMatrix& a, const JetMatrix& b) {
  if (a.cols() != b.rows()) throw ArgumentError("matrix product shape mismatch");
  JetMatrix m(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      Jet2 s;
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      m(i, j) = s;
    }
  return m;
}

namespace {

// Row-reduces `m` in place (augmented with `rhs` when given); returns det.
Jet2 eliminate(JetMatrix& m, JetMatrix* rhs) {
  const int n = m.rows();
  if (m.cols() != n) throw ArgumentError("square matrix required");
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j).value()));
  Jet2 det(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m(r, c).value()) > std::abs(m(piv, c).value())) piv = r;
    if (std::abs(m(piv, c).value()) <= 1e-14 * scale || scale == 0.0) {
      throw DomainError("singular matrix");
    }
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      if (rhs)
        for (int j = 0; j < rhs->cols(); ++j) std::swap((*rhs)(c, j), (*rhs)(piv, j));
      det *= -1.0;
    }
    const Jet2 p = m(c, c);
    det *= p;
    const Jet2 inv = reciprocal(p);
    for (int j = c; j < n; ++j) m(c, j) *= inv;
    if (rhs)
      for (int j = 0; j < rhs->cols(); ++j) (*rhs)(c, j) *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || (!rhs && r < c)) continue;
      const Jet2 f = m(r, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
      if (rhs)
        for (int j = 0; j < rhs->cols(); ++j) (*rhs)(r, j) -= f * (*rhs)(c, j);
    }
  }
  return det;
}

}  // namespace

JetMatrix inverse(const JetMatrix& m) {
  JetMatrix work = m;
  JetMatrix inv = JetMatrix::identity(m.rows());
  eliminate(work, &inv);
  return inv;
}

Jet2 determinant(const JetMatrix& m) {
  if (m.rows() == 0) return Jet2(1.0);
  JetMatrix work = m;
  try {
    return eliminate(work, nullptr);
  } catch (const DomainError&) {
    // A singular value pattern still has a well-defined (zero) determinant;
    // fall back to Laplace expansion, which is exact for the small sizes used.
    if (m.rows() == 1) return m(0, 0);
    Jet2 det;
    for (int j = 0; j < m.cols(); ++j) {
      std::vector<int> rows, cols;
      for (int r = 1; r < m.rows(); ++r) rows.push_back(r);
      for (int c = 0; c < m.cols(); ++c)
        if (c != j) cols.push_back(c);
      Jet2 term = m(0, j) * determinant(submatrix(m, rows, cols));
      if (j % 2) det -= term;
      else det += term;
    }
    return det;
  }
}

JetMatrix submatrix(const JetMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  JetMatrix s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (int i = 0; i < s.rows(); ++i)
    for (int j = 0; j < s.cols(); ++j) s(i, j) = m(rows[i], cols[j]);
  return s;
}

double max_abs_value(const JetMatrix& m) {
  double r = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j).value()));
  return r;
}

bool is_positive_definite(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (m + m.transpose()));
  return llt.info() == Eigen::Success;
}

MetricField::MetricField(int dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("metric dimension out of range");
}

MetricField MetricField::euclidean(int dim) {
  return MetricField(dim, [dim](const ChartPoint&) { return JetMatrix::identity(dim); });
}

JetMatrix MetricField::operator()(const ChartPoint& pt) const {
  if (pt.dim() != dim_) throw ArgumentError("chart point dimension does not match the metric");
  return guarded(pt, [&] { return eval_(pt); });
}

JetMatrix MetricField::positive(const ChartPoint& pt) const {
  JetMatrix g = (*this)(pt);
  if (!is_positive_definite(g.values())) {
    throw EvaluationError("metric is not positive definite", pt.coords());
  }
  return g;
}

MetricField operator+(const MetricField& a, const MetricField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("metrics on different charts");
  return MetricField(a.dim(), [a, b](const ChartPoint& pt) { return a(pt) + b(pt); });
}

MetricField operator-(const MetricField& a, const MetricField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("metrics on different charts");
  return MetricField(a.dim(), [a, b](const ChartPoint& pt) { return a(pt) - b(pt); });
}

MetricField operator*(const ScalarField& f, const MetricField& g) {
  if (f.dim() != g.dim()) throw ArgumentError("factor and metric on different charts");
  return MetricField(g.dim(), [f, g](const ChartPoint& pt) { return f(pt) * g(pt); });
}

MetricField operator*(double c, const MetricField& g) {
  return MetricField(g.dim(), [c, g](const ChartPoint& pt) { return Jet2(c) * g(pt); });
}

MetricField embed(const MetricField& g, int offset, int new_dim) {
  const int m = g.dim();
  if (offset < 0 || offset + m > new_dim) throw ArgumentError("embed: target chart too small");
  return MetricField(new_dim, [g, offset, m, new_dim](const ChartPoint& pt) {
    std::vector<double> sub(pt.coords().begin() + offset, pt.coords().begin() + offset + m);
    JetMatrix small = g(ChartPoint(sub));
    JetMatrix big(new_dim, new_dim);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) big(offset + i, offset + j) = embed(small(i, j), offset, new_dim);
    return big;
  });
}

EndomorphismField::EndomorphismField(int dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("endomorphism dimension out of range");
}

JetMatrix EndomorphismField::operator()(const ChartPoint& pt) const {
  if (pt.dim() != dim_) throw ArgumentError("chart point dimension does not match the field");
  return guarded(pt, [&] { return eval_(pt); });
}

EndomorphismField operator*(const EndomorphismField& a, const EndomorphismField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("endomorphisms on different charts");
  return EndomorphismField(a.dim(), [a, b](const ChartPoint& pt) { return a(pt) * b(pt); });
}

}  // namespace qklab
