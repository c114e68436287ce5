#include "qklab/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qklab {

namespace {

int popcount(Mask m) { return std::popcount(m); }

Mask below(int i) { return (Mask{1} << i) - 1; }

// Sign of dx^I ∧ dx^J relative to dx^{I∪J} (I, J disjoint).
double merge_sign(Mask a, Mask b) {
  int inversions = 0;
  for (Mask rest = a; rest; rest &= rest - 1) {
    const int i = std::countr_zero(rest);
    inversions += popcount(b & below(i));
  }
  return inversions % 2 ? -1.0 : 1.0;
}

// Jet in slot `dim` of an unset coefficient.
Jet2 zero_jet(int dim) { return Jet2::constant(dim, 0.0); }

std::vector<double> sub_coords(const ChartPoint& pt, int offset, int m) {
  return std::vector<double>(pt.coords().begin() + offset, pt.coords().begin() + offset + m);
}

}  // namespace

Mask mask_of(std::initializer_list<int> indices) {
  Mask m = 0;
  for (int i : indices) m |= Mask{1} << i;
  return m;
}

std::vector<int> indices_of(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

// -- FormValue ----------------------------------------------------------------

FormValue::FormValue(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || dim > kMaxDim || degree < 0) throw ArgumentError("invalid form shape");
}

Jet2 FormValue::coeff(Mask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? zero_jet(dim_) : it->second;
}

Jet2 FormValue::component(const std::vector<int>& indices) const {
  if (static_cast<int>(indices.size()) != degree_) throw ArgumentError("component: wrong arity");
  std::vector<int> idx = indices;
  double sign = 1.0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return zero_jet(dim_);
      if (idx[i] > idx[j]) sign = -sign;
    }
  Mask m = 0;
  for (int i : idx) m |= Mask{1} << i;
  return sign * coeff(m);
}

void FormValue::add(Mask m, const Jet2& c) {
  if (popcount(m) != degree_) throw ArgumentError("form term has the wrong degree");
  if (m >> dim_) throw ArgumentError("form index outside the chart");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void FormValue::add(const std::vector<int>& indices, const Jet2& c) {
  Mask m = 0;
  double sign = 1.0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= dim_) throw ArgumentError("form index outside the chart");
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      if (indices[i] == indices[j]) return;
      if (indices[i] > indices[j]) sign = -sign;
    }
    m |= Mask{1} << indices[i];
  }
  add(m, sign * c);
}

FormValue& FormValue::operator+=(const FormValue& o) {
  if (o.degree_ != degree_ || (o.dim_ != dim_ && !o.terms_.empty() && !terms_.empty())) {
    throw ArgumentError("adding forms of different shape");
  }
  dim_ = std::max(dim_, o.dim_);
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

FormValue& FormValue::operator-=(const FormValue& o) {
  FormValue neg = o;
  neg *= Jet2(-1.0);
  return *this += neg;
}

FormValue& FormValue::operator*=(const Jet2& s) {
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

double FormValue::evaluate(const std::vector<std::vector<double>>& vectors) const {
  if (static_cast<int>(vectors.size()) != degree_) throw ArgumentError("evaluate: wrong arity");
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    const std::vector<int> idx = indices_of(m);
    Eigen::MatrixXd a(degree_, degree_);
    for (int r = 0; r < degree_; ++r)
      for (int s = 0; s < degree_; ++s) a(r, s) = vectors[r][idx[s]];
    total += c.value() * (degree_ == 0 ? 1.0 : a.determinant());
  }
  return total;
}

double FormValue::max_abs() const {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c.value()));
  return r;
}

FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
FormValue operator*(const Jet2& s, FormValue a) { return a *= s; }

FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.dim() != b.dim()) throw ArgumentError("wedge: forms on different charts");
  FormValue out(a.dim(), a.degree() + b.degree());
  if (out.degree() > a.dim()) return out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      out.add(ma | mb, merge_sign(ma, mb) * (ca * cb));
    }
  return out;
}

FormValue exterior_derivative(const FormValue& a) {
  FormValue out(a.dim(), a.degree() + 1);
  if (out.degree() > a.dim()) return out;
  for (const auto& [m, c] : a.terms()) {
    if (c.dim() == 0) continue;
    for (int i = 0; i < a.dim(); ++i) {
      if (m & (Mask{1} << i)) continue;
      const double sign = popcount(m & below(i)) % 2 ? -1.0 : 1.0;
      out.add(m | (Mask{1} << i), sign * partial(c, i));
    }
  }
  return out;
}

FormValue interior_product(const std::vector<Jet2>& x, const FormValue& a) {
  if (a.degree() == 0) throw ArgumentError("interior product of a 0-form");
  if (static_cast<int>(x.size()) != a.dim()) throw ArgumentError("interior: vector/form dims differ");
  FormValue out(a.dim(), a.degree() - 1);
  for (const auto& [m, c] : a.terms()) {
    for (Mask rest = m; rest; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      const double sign = popcount(m & below(i)) % 2 ? -1.0 : 1.0;
      out.add(m & ~(Mask{1} << i), sign * (x[i] * c));
    }
  }
  return out;
}

FormValue embed(const FormValue& a, int offset, int new_dim) {
  if (offset < 0 || offset + a.dim() > new_dim) throw ArgumentError("embed: target chart too small");
  FormValue out(new_dim, a.degree());
  for (const auto& [m, c] : a.terms()) out.add(m << offset, embed(c, offset, new_dim));
  return out;
}

// -- KFormField ---------------------------------------------------------------

KFormField::KFormField(int dim, int degree, Eval eval)
    : dim_(dim), degree_(degree), eval_(std::move(eval)) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("form dimension out of range");
  if (degree < 0) throw ArgumentError("negative form degree");
}

KFormField KFormField::zero(int dim, int degree) {
  return KFormField(dim, degree, [dim, degree](const ChartPoint&) { return FormValue(dim, degree); });
}

KFormField KFormField::basis(int dim, std::vector<int> indices, double c) {
  const int degree = static_cast<int>(indices.size());
  FormValue v(dim, degree);
  v.add(indices, Jet2::constant(dim, c));
  return KFormField(dim, degree, [v](const ChartPoint&) { return v; });
}

KFormField KFormField::one_form(const std::vector<ScalarField>& coeffs) {
  const int dim = static_cast<int>(coeffs.size());
  for (const auto& f : coeffs) {
    if (f.valid() && f.dim() != dim) throw ArgumentError("one_form: coefficient on another chart");
  }
  return KFormField(dim, 1, [coeffs, dim](const ChartPoint& pt) {
    FormValue v(dim, 1);
    for (int i = 0; i < dim; ++i)
      if (coeffs[i].valid()) v.add(Mask{1} << i, coeffs[i](pt));
    return v;
  });
}

KFormField KFormField::function(const ScalarField& f) {
  return KFormField(f.dim(), 0, [f](const ChartPoint& pt) {
    FormValue v(f.dim(), 0);
    v.add(0, f(pt));
    return v;
  });
}

FormValue KFormField::operator()(const ChartPoint& pt) const {
  if (pt.dim() != dim_) throw ArgumentError("chart point dimension does not match the form");
  return guarded(pt, [&] { return eval_(pt); });
}

namespace {

void same_shape(const KFormField& a, const KFormField& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) {
    throw ArgumentError("forms differ in dimension or degree");
  }
}

}  // namespace

KFormField operator+(const KFormField& a, const KFormField& b) {
  same_shape(a, b);
  return KFormField(a.dim(), a.degree(), [a, b](const ChartPoint& pt) { return a(pt) + b(pt); });
}

KFormField operator-(const KFormField& a, const KFormField& b) {
  same_shape(a, b);
  return KFormField(a.dim(), a.degree(), [a, b](const ChartPoint& pt) { return a(pt) - b(pt); });
}

KFormField operator-(const KFormField& a) { return -1.0 * a; }

KFormField operator*(const ScalarField& f, const KFormField& a) {
  if (f.dim() != a.dim()) throw ArgumentError("factor and form on different charts");
  return KFormField(a.dim(), a.degree(), [f, a](const ChartPoint& pt) { return f(pt) * a(pt); });
}

KFormField operator*(double c, const KFormField& a) {
  return KFormField(a.dim(), a.degree(), [c, a](const ChartPoint& pt) { return Jet2(c) * a(pt); });
}

KFormField wedge(const KFormField& a, const KFormField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("wedge: forms on different charts");
  return KFormField(a.dim(), a.degree() + b.degree(),
                    [a, b](const ChartPoint& pt) { return wedge(a(pt), b(pt)); });
}

KFormField wedge_power(const KFormField& a, int power) {
  if (power < 1) throw ArgumentError("wedge_power: power must be positive");
  return KFormField(a.dim(), a.degree() * power, [a, power](const ChartPoint& pt) {
    const FormValue v = a(pt);
    FormValue acc = v;
    for (int k = 1; k < power; ++k) acc = wedge(acc, v);
    return acc;
  });
}

KFormField exterior_derivative(const KFormField& a) {
  return KFormField(a.dim(), a.degree() + 1,
                    [a](const ChartPoint& pt) { return exterior_derivative(a(pt)); });
}

KFormField embed(const KFormField& a, int offset, int new_dim) {
  const int m = a.dim();
  if (offset < 0 || offset + m > new_dim) throw ArgumentError("embed: target chart too small");
  return KFormField(new_dim, a.degree(), [a, offset, m, new_dim](const ChartPoint& pt) {
    return embed(a(ChartPoint(sub_coords(pt, offset, m))), offset, new_dim);
  });
}

ScalarField as_function(const KFormField& a) {
  if (a.degree() != 0) throw ArgumentError("as_function: form is not a 0-form");
  return ScalarField(a.dim(), [a](const ChartPoint& pt) { return a(pt).coeff(0); });
}

// -- VectorField --------------------------------------------------------------

VectorField::VectorField(int dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("vector field dimension out of range");
}

VectorField VectorField::coordinate(int index, int dim) {
  if (index < 0 || index >= dim) throw ArgumentError("coordinate field index out of range");
  return VectorField(dim, [index, dim](const ChartPoint&) {
    std::vector<Jet2> v(dim, Jet2::constant(dim, 0.0));
    v[index] = Jet2::constant(dim, 1.0);
    return v;
  });
}

VectorField VectorField::from_components(const std::vector<ScalarField>& comps) {
  const int dim = static_cast<int>(comps.size());
  return VectorField(dim, [comps, dim](const ChartPoint& pt) {
    std::vector<Jet2> v(dim, Jet2::constant(dim, 0.0));
    for (int i = 0; i < dim; ++i)
      if (comps[i].valid()) v[i] = comps[i](pt);
    return v;
  });
}

VectorField VectorField::linear(const Eigen::MatrixXd& a) {
  const int dim = static_cast<int>(a.rows());
  return VectorField(dim, [a, dim](const ChartPoint& pt) {
    std::vector<Jet2> x = pt.coordinates();
    std::vector<Jet2> v(dim, Jet2::constant(dim, 0.0));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        if (a(i, j) != 0.0) v[i] += a(i, j) * x[j];
    return v;
  });
}

std::vector<Jet2> VectorField::operator()(const ChartPoint& pt) const {
  if (pt.dim() != dim_) throw ArgumentError("chart point dimension does not match the vector field");
  return guarded(pt, [&] { return eval_(pt); });
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("vector fields on different charts");
  return VectorField(a.dim(), [a, b](const ChartPoint& pt) {
    auto x = a(pt);
    const auto y = b(pt);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return x;
  });
}

VectorField operator-(const VectorField& a, const VectorField& b) { return a + (-1.0) * b; }

VectorField operator*(const ScalarField& f, const VectorField& x) {
  if (f.dim() != x.dim()) throw ArgumentError("factor and vector field on different charts");
  return VectorField(x.dim(), [f, x](const ChartPoint& pt) {
    auto v = x(pt);
    const Jet2 s = f(pt);
    for (auto& c : v) c *= s;
    return v;
  });
}

VectorField operator*(double c, const VectorField& x) {
  return VectorField(x.dim(), [c, x](const ChartPoint& pt) {
    auto v = x(pt);
    for (auto& e : v) e *= c;
    return v;
  });
}

VectorField embed(const VectorField& x, int offset, int new_dim) {
  const int m = x.dim();
  if (offset < 0 || offset + m > new_dim) throw ArgumentError("embed: target chart too small");
  return VectorField(new_dim, [x, offset, m, new_dim](const ChartPoint& pt) {
    const auto small = x(ChartPoint(sub_coords(pt, offset, m)));
    std::vector<Jet2> v(new_dim, Jet2::constant(new_dim, 0.0));
    for (int i = 0; i < m; ++i) v[offset + i] = embed(small[i], offset, new_dim);
    return v;
  });
}

KFormField interior_product(const VectorField& x, const KFormField& a) {
  if (x.dim() != a.dim()) throw ArgumentError("interior: vector field and form on different charts");
  if (a.degree() == 0) throw ArgumentError("interior product of a 0-form");
  return KFormField(a.dim(), a.degree() - 1,
                    [x, a](const ChartPoint& pt) { return interior_product(x(pt), a(pt)); });
}

KFormField lie_derivative(const VectorField& x, const KFormField& a) {
  if (x.dim() != a.dim()) throw ArgumentError("lie: vector field and form on different charts");
  return KFormField(a.dim(), a.degree(), [x, a](const ChartPoint& pt) {
    const auto xv = x(pt);
    const FormValue av = a(pt);
    FormValue out = interior_product(xv, exterior_derivative(av));
    if (av.degree() > 0) out += exterior_derivative(interior_product(xv, av));
    return out;
  });
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  if (x.dim() != y.dim()) throw ArgumentError("bracket: vector fields on different charts");
  const int n = x.dim();
  return VectorField(n, [x, y, n](const ChartPoint& pt) {
    const auto xv = x(pt);
    const auto yv = y(pt);
    std::vector<Jet2> out(n, Jet2::constant(n, 0.0));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        if (yv[k].dim()) out[k] += xv[i] * partial(yv[k], i);
        if (xv[k].dim()) out[k] -= yv[i] * partial(xv[k], i);
      }
    return out;
  });
}

ScalarField directional(const VectorField& x, const ScalarField& f) {
  if (x.dim() != f.dim()) throw ArgumentError("directional: field and function on different charts");
  return ScalarField(f.dim(), [x, f](const ChartPoint& pt) {
    const auto xv = x(pt);
    const Jet2 fv = f(pt);
    Jet2 s = Jet2::constant(f.dim(), 0.0);
    for (int i = 0; i < f.dim(); ++i) s += xv[i] * partial(fv, i);
    return s;
  });
}

KFormField hodge_star(const MetricField& g, const KFormField& a) {
  if (g.dim() != a.dim()) throw ArgumentError("hodge: metric and form on different charts");
  const int n = a.dim();
  const Mask full = n == 32 ? ~Mask{0} : (Mask{1} << n) - 1;
  return KFormField(n, n - a.degree(), [g, a, n, full](const ChartPoint& pt) {
    const JetMatrix gv = g.positive(pt);
    const JetMatrix ginv = inverse(gv);
    const Jet2 vol = sqrt(determinant(gv));
    const FormValue av = a(pt);
    FormValue out(n, n - av.degree());
    // raised coefficients a^I = Σ_K det(g^{-1}[I, K]) a_K over all increasing I
    for (Mask I = 0; I <= full; ++I) {
      if (popcount(I) != av.degree()) continue;
      const std::vector<int> ri = indices_of(I);
      Jet2 raised = Jet2::constant(n, 0.0);
      for (const auto& [K, c] : av.terms()) {
        raised += determinant(submatrix(ginv, ri, indices_of(K))) * c;
      }
      const Mask rest = full & ~I;
      out.add(rest, merge_sign(I, rest) * (vol * raised));
    }
    return out;
  });
}

MetricField square(const KFormField& theta) { return symmetric_product(theta, theta); }

MetricField symmetric_product(const KFormField& a, const KFormField& b) {
  if (a.degree() != 1 || b.degree() != 1) throw ArgumentError("symmetric product of non-1-forms");
  if (a.dim() != b.dim()) throw ArgumentError("symmetric product: forms on different charts");
  const int n = a.dim();
  return MetricField(n, [a, b, n](const ChartPoint& pt) {
    const FormValue av = a(pt);
    const FormValue bv = b(pt);
    JetMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = Jet2::constant(n, 0.0);
    for (const auto& [mi, ci] : av.terms())
      for (const auto& [mj, cj] : bv.terms()) {
        const int i = std::countr_zero(mi);
        const int j = std::countr_zero(mj);
        const Jet2 h = 0.5 * (ci * cj);
        m(i, j) += h;
        m(j, i) += h;
      }
    return m;
  });
}

MetricField lie_derivative(const VectorField& x, const MetricField& g) {
  if (x.dim() != g.dim()) throw ArgumentError("lie: vector field and tensor on different charts");
  const int n = g.dim();
  return MetricField(n, [x, g, n](const ChartPoint& pt) {
    const auto xv = x(pt);
    const JetMatrix gv = g(pt);
    JetMatrix out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet2 s = Jet2::constant(n, 0.0);
        for (int k = 0; k < n; ++k) {
          if (gv(i, j).dim()) s += xv[k] * partial(gv(i, j), k);
          if (xv[k].dim()) {
            s += gv(k, j) * partial(xv[k], i);
            s += gv(i, k) * partial(xv[k], j);
          }
        }
        out(i, j) = s;
      }
    return out;
  });
}

KFormField flat(const MetricField& g, const VectorField& x) {
  if (x.dim() != g.dim()) throw ArgumentError("flat: vector field and metric on different charts");
  const int n = g.dim();
  return KFormField(n, 1, [g, x, n](const ChartPoint& pt) {
    const auto xv = x(pt);
    const JetMatrix gv = g(pt);
    FormValue out(n, 1);
    for (int i = 0; i < n; ++i) {
      Jet2 s = Jet2::constant(n, 0.0);
      for (int j = 0; j < n; ++j) s += gv(i, j) * xv[j];
      out.add(Mask{1} << i, s);
    }
    return out;
  });
}

ScalarField inner(const MetricField& g, const VectorField& x, const VectorField& y) {
  const int n = g.dim();
  return ScalarField(n, [g, x, y, n](const ChartPoint& pt) {
    const auto xv = x(pt);
    const auto yv = y(pt);
    const JetMatrix gv = g(pt);
    Jet2 s = Jet2::constant(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += gv(i, j) * xv[i] * yv[j];
    return s;
  });
}

VectorField apply(const EndomorphismField& j, const VectorField& x) {
  const int n = x.dim();
  return VectorField(n, [j, x, n](const ChartPoint& pt) {
    const JetMatrix jm = j(pt);
    const auto xv = x(pt);
    std::vector<Jet2> out(n, Jet2::constant(n, 0.0));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[a] += jm(a, b) * xv[b];
    return out;
  });
}

KFormField precompose(const KFormField& theta, const EndomorphismField& j) {
  if (theta.degree() != 1) throw ArgumentError("precompose expects a one-form");
  const int n = theta.dim();
  return KFormField(n, 1, [theta, j, n](const ChartPoint& pt) {
    const JetMatrix jm = j(pt);
    const FormValue tv = theta(pt);
    FormValue out(n, 1);
    for (int b = 0; b < n; ++b) {
      Jet2 s = Jet2::constant(n, 0.0);
      for (const auto& [m, c] : tv.terms()) s += c * jm(std::countr_zero(m), b);
      out.add(Mask{1} << b, s);
    }
    return out;
  });
}

// -- complex forms --------------------------------------------------------------

ComplexFormField::ComplexFormField(KFormField re, KFormField im)
    : re_(std::move(re)), im_(std::move(im)) {
  if (re_.dim() != im_.dim() || re_.degree() != im_.degree()) {
    throw ArgumentError("complex form parts differ in shape");
  }
}

ComplexFormField wedge(const ComplexFormField& a, const ComplexFormField& b) {
  return ComplexFormField(wedge(a.re(), b.re()) - wedge(a.im(), b.im()),
                          wedge(a.re(), b.im()) + wedge(a.im(), b.re()));
}

ComplexFormField exterior_derivative(const ComplexFormField& a) {
  return ComplexFormField(exterior_derivative(a.re()), exterior_derivative(a.im()));
}

// -- maps and pullbacks ---------------------------------------------------------

SmoothMap::SmoothMap(int source_dim, int target_dim, Eval components, JacobianEval jacobian)
    : source_dim_(source_dim),
      target_dim_(target_dim),
      components_(std::move(components)),
      jacobian_(std::move(jacobian)) {
  if (source_dim < 1 || source_dim > kMaxDim || target_dim < 1 || target_dim > kMaxDim) {
    throw ArgumentError("map dimensions out of range");
  }
}

std::vector<Jet2> SmoothMap::operator()(const ChartPoint& pt) const {
  if (pt.dim() != source_dim_) throw ArgumentError("chart point does not match the map source");
  auto v = guarded(pt, [&] { return components_(pt); });
  if (static_cast<int>(v.size()) != target_dim_) throw ArgumentError("map returned wrong arity");
  for (auto& c : v)
    if (c.dim() == 0) c = Jet2::constant(source_dim_, c.value());
  return v;
}

JetMatrix SmoothMap::jacobian(const ChartPoint& pt) const {
  if (jacobian_) {
    JetMatrix j = guarded(pt, [&] { return jacobian_(pt); });
    if (j.rows() != target_dim_ || j.cols() != source_dim_) {
      throw ArgumentError("explicit Jacobian has the wrong shape");
    }
    return j;
  }
  const auto phi = (*this)(pt);
  JetMatrix j(target_dim_, source_dim_);
  for (int i = 0; i < target_dim_; ++i)
    for (int a = 0; a < source_dim_; ++a) j(i, a) = partial(phi[i], a);
  return j;
}

double SmoothMap::jacobian_mismatch(const ChartPoint& pt) const {
  if (!jacobian_) return 0.0;
  const auto phi = (*this)(pt);
  const JetMatrix j = jacobian(pt);
  double worst = 0.0;
  for (int i = 0; i < target_dim_; ++i)
    for (int a = 0; a < source_dim_; ++a) {
      const Jet2 ad = partial(phi[i], a);
      Jet2 ex = j(i, a);
      if (ex.dim() == 0) ex = Jet2::constant(source_dim_, ex.value());
      worst = std::max(worst, max_abs_difference(ad, ex));
    }
  return worst;
}

namespace {

ChartPoint image_point(const std::vector<Jet2>& phi) {
  std::vector<double> c;
  c.reserve(phi.size());
  for (const auto& v : phi) c.push_back(v.value());
  return ChartPoint(std::move(c));
}

}  // namespace

ScalarField pullback(const SmoothMap& phi, const ScalarField& f) {
  if (f.dim() != phi.target_dim()) throw ArgumentError("pullback: field not on the map target");
  return ScalarField(phi.source_dim(), [phi, f](const ChartPoint& pt) {
    const auto v = phi(pt);
    return compose(f(image_point(v)), v);
  });
}

KFormField pullback(const SmoothMap& phi, const KFormField& a) {
  if (a.dim() != phi.target_dim()) throw ArgumentError("pullback: form not on the map target");
  const int n = phi.source_dim();
  return KFormField(n, a.degree(), [phi, a, n](const ChartPoint& pt) {
    const auto v = phi(pt);
    const FormValue av = a(image_point(v));
    const JetMatrix jac = phi.jacobian(pt);
    FormValue out(n, av.degree());
    if (av.degree() > n) return out;
    std::map<int, FormValue> dphi;
    for (const auto& [m, c] : av.terms()) {
      FormValue term(n, 0);
      term.add(0, compose(c, v));
      for (int i : indices_of(m)) {
        auto it = dphi.find(i);
        if (it == dphi.end()) {
          FormValue d(n, 1);
          for (int b = 0; b < n; ++b) d.add(Mask{1} << b, jac(i, b));
          it = dphi.emplace(i, std::move(d)).first;
        }
        term = wedge(term, it->second);
      }
      out += term;
    }
    return out;
  });
}

MetricField pullback(const SmoothMap& phi, const MetricField& g) {
  if (g.dim() != phi.target_dim()) throw ArgumentError("pullback: metric not on the map target");
  const int n = phi.source_dim();
  const int m = phi.target_dim();
  return MetricField(n, [phi, g, n, m](const ChartPoint& pt) {
    const auto v = phi(pt);
    const JetMatrix gv = g(image_point(v));
    const JetMatrix jac = phi.jacobian(pt);
    JetMatrix gc(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gc(i, j) = gv(i, j).dim() ? compose(gv(i, j), v) : gv(i, j);
    JetMatrix out = jac.transpose() * gc * jac;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (out(a, b).dim() == 0) out(a, b) = Jet2::constant(n, out(a, b).value());
    return out;
  });
}

}  // namespace qklab
