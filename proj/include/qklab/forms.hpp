#pragma once

// Differential forms and vector fields on a chart.
//
// A k-form value stores its coefficients sparsely, keyed by the bitmask of the
// strictly increasing index tuple I = (i_1 < ... < i_k); the coefficient of
// dx^{i_1} ∧ ... ∧ dx^{i_k} is a jet. Field types wrap point-evaluators, and
// every operation (wedge, d, interior product, Lie derivative, Hodge star,
// pullback) acts on jet-valued coefficients, so derivatives stay exact.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qklab/tensor.hpp"

namespace qklab {

using Mask = std::uint32_t;

Mask mask_of(std::initializer_list<int> indices);
std::vector<int> indices_of(Mask m);

class FormValue {
 public:
  FormValue() = default;
  FormValue(int dim, int degree);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  const std::map<Mask, Jet2>& terms() const noexcept { return terms_; }

  /// Coefficient on dx^I for increasing I (zero when absent).
  Jet2 coeff(Mask m) const;
  /// Coefficient on dx^{i_1}∧…∧dx^{i_k} for arbitrary distinct indices,
  /// including the permutation sign.
  Jet2 component(const std::vector<int>& indices) const;

  void add(Mask m, const Jet2& c);
  /// Adds c · dx^{i_1}∧…∧dx^{i_k}; indices need not be sorted.
  void add(const std::vector<int>& indices, const Jet2& c);

  FormValue& operator+=(const FormValue& o);
  FormValue& operator-=(const FormValue& o);
  FormValue& operator*=(const Jet2& s);

  /// a(v_1, …, v_k) for the values of the coefficients.
  double evaluate(const std::vector<std::vector<double>>& vectors) const;
  /// Largest |coefficient value|.
  double max_abs() const;

 private:
  int dim_ = 0;
  int degree_ = 0;
  std::map<Mask, Jet2> terms_;
};

FormValue operator+(FormValue a, const FormValue& b);
FormValue operator-(FormValue a, const FormValue& b);
FormValue operator*(const Jet2& s, FormValue a);

FormValue wedge(const FormValue& a, const FormValue& b);
FormValue exterior_derivative(const FormValue& a);
FormValue interior_product(const std::vector<Jet2>& x, const FormValue& a);
/// Re-expresses a form on a chart of dimension new_dim, shifting indices by offset.
FormValue embed(const FormValue& a, int offset, int new_dim);

class KFormField {
 public:
  using Eval = std::function<FormValue(const ChartPoint&)>;

  KFormField() = default;
  KFormField(int dim, int degree, Eval eval);

  static KFormField zero(int dim, int degree);
  /// Constant form c · dx^{i_1}∧…∧dx^{i_k}.
  static KFormField basis(int dim, std::vector<int> indices, double c = 1.0);
  /// Σ coeffs[i] dx^i.
  static KFormField one_form(const std::vector<ScalarField>& coeffs);
  /// f as a 0-form.
  static KFormField function(const ScalarField& f);

  int dim() const noexcept { return dim_; }
  int degree() const noexcept { return degree_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }
  FormValue operator()(const ChartPoint& pt) const;

 private:
  int dim_ = 0;
  int degree_ = 0;
  Eval eval_;
};

KFormField operator+(const KFormField& a, const KFormField& b);
KFormField operator-(const KFormField& a, const KFormField& b);
KFormField operator-(const KFormField& a);
KFormField operator*(const ScalarField& f, const KFormField& a);
KFormField operator*(double c, const KFormField& a);

KFormField wedge(const KFormField& a, const KFormField& b);
/// a ∧ a ∧ … (power factors).
KFormField wedge_power(const KFormField& a, int power);
KFormField exterior_derivative(const KFormField& a);
KFormField embed(const KFormField& a, int offset, int new_dim);

/// Coefficient of a 0-form as a scalar field.
ScalarField as_function(const KFormField& a);

class VectorField {
 public:
  using Eval = std::function<std::vector<Jet2>(const ChartPoint&)>;

  VectorField() = default;
  VectorField(int dim, Eval eval);

  static VectorField coordinate(int index, int dim);
  static VectorField from_components(const std::vector<ScalarField>& comps);
  /// Linear field x ↦ A x.
  static VectorField linear(const Eigen::MatrixXd& a);

  int dim() const noexcept { return dim_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }
  std::vector<Jet2> operator()(const ChartPoint& pt) const;

 private:
  int dim_ = 0;
  Eval eval_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const ScalarField& f, const VectorField& x);
VectorField operator*(double c, const VectorField& x);
VectorField embed(const VectorField& x, int offset, int new_dim);

KFormField interior_product(const VectorField& x, const KFormField& a);
/// Cartan: L_X a = d(ι_X a) + ι_X(da).
KFormField lie_derivative(const VectorField& x, const KFormField& a);
VectorField lie_bracket(const VectorField& x, const VectorField& y);
/// X(f) = df(X).
ScalarField directional(const VectorField& x, const ScalarField& f);

/// Hodge star for the orientation given by the coordinate order.
KFormField hodge_star(const MetricField& g, const KFormField& a);

/// Symmetric products of one-forms as metric tensors.
MetricField square(const KFormField& theta);
MetricField symmetric_product(const KFormField& a, const KFormField& b);

/// Lie derivative of a (0,2)-tensor: (L_X g)_ij = X^k ∂_k g_ij + g_kj ∂_i X^k + g_ik ∂_j X^k.
MetricField lie_derivative(const VectorField& x, const MetricField& g);

/// g(X, ·) as a one-form, g(X, Y) as a function.
KFormField flat(const MetricField& g, const VectorField& x);
ScalarField inner(const MetricField& g, const VectorField& x, const VectorField& y);

/// Applies J to a vector: (J X)^i = J^i_j X^j.
VectorField apply(const EndomorphismField& j, const VectorField& x);
/// Action on one-forms by precomposition: (θ ∘ J)_j = θ_i J^i_j.
KFormField precompose(const KFormField& theta, const EndomorphismField& j);

class ComplexFormField {
 public:
  ComplexFormField() = default;
  ComplexFormField(KFormField re, KFormField im);

  const KFormField& re() const noexcept { return re_; }
  const KFormField& im() const noexcept { return im_; }
  int dim() const noexcept { return re_.dim(); }
  int degree() const noexcept { return re_.degree(); }

 private:
  KFormField re_;
  KFormField im_;
};

ComplexFormField wedge(const ComplexFormField& a, const ComplexFormField& b);
ComplexFormField exterior_derivative(const ComplexFormField& a);

/// A map between charts, Φ: source → target. The optional explicit Jacobian
/// (rows = target coordinates, cols = source coordinates, entries with full
/// jets) keeps pulled-back forms differentiable twice; without it pullbacks
/// know one derivative fewer.
class SmoothMap {
 public:
  using Eval = std::function<std::vector<Jet2>(const ChartPoint&)>;
  using JacobianEval = std::function<JetMatrix(const ChartPoint&)>;

  SmoothMap() = default;
  SmoothMap(int source_dim, int target_dim, Eval components, JacobianEval jacobian = {});

  int source_dim() const noexcept { return source_dim_; }
  int target_dim() const noexcept { return target_dim_; }
  bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }

  std::vector<Jet2> operator()(const ChartPoint& pt) const;
  /// Explicit Jacobian if supplied, else the one read off the component jets.
  JetMatrix jacobian(const ChartPoint& pt) const;
  /// Max |explicit Jacobian − AD Jacobian| over value and gradient entries;
  /// 0 if no explicit Jacobian.
  double jacobian_mismatch(const ChartPoint& pt) const;

 private:
  int source_dim_ = 0;
  int target_dim_ = 0;
  Eval components_;
  JacobianEval jacobian_;
};

ScalarField pullback(const SmoothMap& phi, const ScalarField& f);
KFormField pullback(const SmoothMap& phi, const KFormField& a);
MetricField pullback(const SmoothMap& phi, const MetricField& g);

}  // namespace qklab
