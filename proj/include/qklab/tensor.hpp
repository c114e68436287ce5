#pragma once

// Small dense matrices of jets and the matrix-valued fields built on them:
// metrics (symmetric (0,2)-tensors) and endomorphisms J^i_j.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qklab/field.hpp"

namespace qklab {

class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static JetMatrix identity(int n);
  static JetMatrix from_values(const Eigen::MatrixXd& m);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  Jet2& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const Jet2& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  Eigen::MatrixXd values() const;
  /// Entrywise d/dx_k.
  JetMatrix partial(int k) const;
  JetMatrix transpose() const;

  JetMatrix& operator+=(const JetMatrix& o);
  JetMatrix& operator-=(const JetMatrix& o);
  JetMatrix& operator*=(const Jet2& s);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet2> data_;
};

JetMatrix operator+(JetMatrix a, const JetMatrix& b);
JetMatrix operator-(JetMatrix a, const JetMatrix& b);
JetMatrix operator*(const JetMatrix& a, const JetMatrix& b);
JetMatrix operator*(const Jet2& s, JetMatrix a);

/// Gauss-Jordan with partial pivoting on values; singular → DomainError.
JetMatrix inverse(const JetMatrix& m);
Jet2 determinant(const JetMatrix& m);
/// Submatrix on the given rows/columns.
JetMatrix submatrix(const JetMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols);
double max_abs_value(const JetMatrix& m);

bool is_positive_definite(const Eigen::MatrixXd& m);

class MetricField {
 public:
  using Eval = std::function<JetMatrix(const ChartPoint&)>;

  MetricField() = default;
  MetricField(int dim, Eval eval);

  static MetricField euclidean(int dim);

  int dim() const noexcept { return dim_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }
  JetMatrix operator()(const ChartPoint& pt) const;
  /// Evaluates and throws EvaluationError unless the values are positive definite.
  JetMatrix positive(const ChartPoint& pt) const;

 private:
  int dim_ = 0;
  Eval eval_;
};

MetricField operator+(const MetricField& a, const MetricField& b);
MetricField operator-(const MetricField& a, const MetricField& b);
MetricField operator*(const ScalarField& f, const MetricField& g);
MetricField operator*(double c, const MetricField& g);
/// g on a chart of dimension new_dim, occupying the block starting at offset
/// and evaluated on the coordinates in that block.
MetricField embed(const MetricField& g, int offset, int new_dim);

class EndomorphismField {
 public:
  using Eval = std::function<JetMatrix(const ChartPoint&)>;

  EndomorphismField() = default;
  EndomorphismField(int dim, Eval eval);

  int dim() const noexcept { return dim_; }
  /// Entry (i, j) is J^i_j, so J(∂_j) = J^i_j ∂_i.
  JetMatrix operator()(const ChartPoint& pt) const;

 private:
  int dim_ = 0;
  Eval eval_;
};

EndomorphismField operator*(const EndomorphismField& a, const EndomorphismField& b);

}  // namespace qklab
