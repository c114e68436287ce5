#include "qklab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace qklab {

namespace {


int packed_size(int dim) { return dim * (dim + 1) / 2; }

[[noreturn]] void domain_fail(const char* fn, double value) {
  std::ostringstream os;
  os << fn << " outside its domain at argument " << value;
  throw DomainError(os.str());
}

}  // namespace

Jet2 Jet2::constant(int dim, double value) {
  if (dim < 0 || dim > kMaxDim) throw ArgumentError("jet dimension out of range");
  Jet2 j(value);
  j.dim_ = static_cast<std::int8_t>(dim);
  return j;
}

Jet2 Jet2::variable(int dim, int index, double value) {
  if (index < 0 || index >= dim) throw ArgumentError("coordinate index out of range");
  Jet2 j = constant(dim, value);
  j.grad_[index] = 1.0;
  return j;
}

void Jet2::require_order(int needed) const {
  if (order_ < needed) {
    throw DomainError("derivative of order " + std::to_string(needed) +
                      " requested from a jet that only knows order " + std::to_string(order_));
  }
}

void Jet2::clear_unknown() {
  if (order_ < 2) std::fill(hess_.begin(), hess_.end(), 0.0);
  if (order_ < 1) std::fill(grad_.begin(), grad_.end(), 0.0);
}

void Jet2::adopt_dim(const Jet2& other) {
  if (dim_ == other.dim_ || other.dim_ == 0) return;
  if (dim_ == 0) {
    dim_ = other.dim_;
    return;
  }
  throw ArgumentError("jet dimension mismatch: " + std::to_string(dim_) + " vs " +
                      std::to_string(other.dim_));
}

Jet2& Jet2::operator+=(const Jet2& other) {
  adopt_dim(other);
  value_ += other.value_;
  const int n = other.dim_;
  for (int i = 0; i < n; ++i) grad_[i] += other.grad_[i];
  order_ = std::min(order_, other.order_);
  if (order_ >= 2) {
    for (int k = 0, m = packed_size(n); k < m; ++k) hess_[k] += other.hess_[k];
  }
  clear_unknown();
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& other) {
  adopt_dim(other);
  value_ -= other.value_;
  const int n = other.dim_;
  for (int i = 0; i < n; ++i) grad_[i] -= other.grad_[i];
  order_ = std::min(order_, other.order_);
  if (order_ >= 2) {
    for (int k = 0, m = packed_size(n); k < m; ++k) hess_[k] -= other.hess_[k];
  }
  clear_unknown();
  return *this;
}

Jet2& Jet2::operator*=(const Jet2& other) {
  adopt_dim(other);
  const int n = dim_;
  const double a = value_;
  const double b = other.value_;
  order_ = std::min(order_, other.order_);
  if (order_ >= 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int k = packed_index(i, j);
        hess_[k] = a * other.hess_[k] + b * hess_[k] + grad_[i] * other.grad_[j] +
                   grad_[j] * other.grad_[i];
      }
    }
  } else {
    std::fill(hess_.begin(), hess_.begin() + packed_size(n), 0.0);
  }
  for (int i = 0; i < n; ++i) grad_[i] = a * other.grad_[i] + b * grad_[i];
  value_ = a * b;
  clear_unknown();
  return *this;
}

Jet2& Jet2::operator/=(const Jet2& other) { return *this *= reciprocal(other); }

Jet2& Jet2::operator*=(double s) {
  value_ *= s;
  for (int i = 0; i < dim_; ++i) grad_[i] *= s;
  for (int k = 0, m = packed_size(dim_); k < m; ++k) hess_[k] *= s;
  return *this;
}

Jet2 Jet2::operator-() const {
  Jet2 r = *this;
  r *= -1.0;
  return r;
}

Jet2 Jet2::apply(double f0, double f1, double f2) const {
  Jet2 r = *this;
  r.value_ = f0;
  const int n = dim_;
  if (order_ >= 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const int k = packed_index(i, j);
        r.hess_[k] = f1 * hess_[k] + f2 * grad_[i] * grad_[j];
      }
    }
  }
  for (int i = 0; i < n; ++i) r.grad_[i] = f1 * grad_[i];
  return r;
}

Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
Jet2 operator*(Jet2 a, const Jet2& b) { return a *= b; }
Jet2 operator/(Jet2 a, const Jet2& b) { return a /= b; }
Jet2 operator*(Jet2 a, double s) { return a *= s; }
Jet2 operator*(double s, Jet2 a) { return a *= s; }

Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.value());
  return u.apply(e, e, e);
}

Jet2 log(const Jet2& u) {
  const double x = u.value();
  if (!(x > 0.0)) domain_fail("log", x);
  return u.apply(std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.value());
  return u.apply(s, std::cos(u.value()), -s);
}

Jet2 cos(const Jet2& u) {
  const double c = std::cos(u.value());
  return u.apply(c, -std::sin(u.value()), -c);
}

Jet2 tan(const Jet2& u) {
  const double c = std::cos(u.value());
  if (c == 0.0) domain_fail("tan", u.value());
  const double t = std::tan(u.value());
  const double sec2 = 1.0 + t * t;
  return u.apply(t, sec2, 2.0 * t * sec2);
}

Jet2 sinh(const Jet2& u) {
  const double s = std::sinh(u.value());
  return u.apply(s, std::cosh(u.value()), s);
}

Jet2 cosh(const Jet2& u) {
  const double c = std::cosh(u.value());
  return u.apply(c, std::sinh(u.value()), c);
}

Jet2 tanh(const Jet2& u) {
  const double t = std::tanh(u.value());
  const double sech2 = 1.0 - t * t;
  return u.apply(t, sech2, -2.0 * t * sech2);
}

Jet2 sqrt(const Jet2& u) {
  const double x = u.value();
  if (!(x > 0.0)) domain_fail("sqrt", x);
  const double r = std::sqrt(x);
  return u.apply(r, 0.5 / r, -0.25 / (r * x));
}

Jet2 atan(const Jet2& u) {
  const double x = u.value();
  const double d = 1.0 / (1.0 + x * x);
  return u.apply(std::atan(x), d, -2.0 * x * d * d);
}

Jet2 acosh(const Jet2& u) {
  const double x = u.value();
  if (!(x > 1.0)) domain_fail("acosh", x);
  const double s = std::sqrt(x * x - 1.0);
  return u.apply(std::acosh(x), 1.0 / s, -x / (s * s * s));
}

Jet2 reciprocal(const Jet2& u) {
  const double x = u.value();
  if (x == 0.0) domain_fail("division", x);
  const double r = 1.0 / x;
  return u.apply(r, -r * r, 2.0 * r * r * r);
}

Jet2 pow(const Jet2& u, int exponent) {
  const double x = u.value();
  if (exponent == 0) return u.apply(1.0, 0.0, 0.0);
  if (exponent < 0 && x == 0.0) domain_fail("pow", x);
  const double n = exponent;
  const double xn2 = exponent >= 2 ? std::pow(x, exponent - 2) : std::pow(x, n - 2.0);
  const double f2 = n * (n - 1.0) * xn2;
  const double f1 = exponent >= 1 ? n * std::pow(x, exponent - 1) : n * std::pow(x, n - 1.0);
  return u.apply(std::pow(x, exponent), f1, f2);
}

Jet2 pow(const Jet2& u, double exponent) {
  if (exponent == std::floor(exponent) && std::abs(exponent) < 1e9) {
    return pow(u, static_cast<int>(exponent));
  }
  const double x = u.value();
  if (!(x > 0.0)) domain_fail("pow", x);
  const double p = std::pow(x, exponent);
  return u.apply(p, exponent * p / x, exponent * (exponent - 1.0) * p / (x * x));
}

Jet2 pow(const Jet2& base, const Jet2& exponent) {
  if (exponent.dim() == 0 || exponent.order() >= 0) {
    bool constant = true;
    for (int i = 0; i < exponent.dim(); ++i) constant = constant && exponent.grad(i) == 0.0;
    for (int i = 0; constant && exponent.order() >= 2 && i < exponent.dim(); ++i)
      for (int j = 0; j <= i; ++j) constant = constant && exponent.hess(i, j) == 0.0;
    if (constant) return pow(base, exponent.value());
  }
  return exp(exponent * log(base));
}

Jet2 square(const Jet2& u) { return u * u; }

Jet2 partial(const Jet2& u, int index) {
  if (index < 0 || index >= u.dim()) throw ArgumentError("partial: index out of range");
  u.require_order(1);
  Jet2 r = Jet2::constant(u.dim(), u.grad(index));
  if (u.order() >= 2) {
    for (int i = 0; i < u.dim(); ++i) r.set_grad(i, u.hess(index, i));
  }
  r.set_order(u.order() - 1);
  r.clear_unknown();
  return r;
}

Jet2 compose(const Jet2& outer, std::span<const Jet2> inner) {
  const int m = static_cast<int>(inner.size());
  if (outer.dim() != m && !(outer.dim() == 0)) {
    throw ArgumentError("compose: outer jet dimension does not match the number of inner jets");
  }
  int n = 0;
  int order = outer.order();
  for (const Jet2& v : inner) {
    if (v.dim() != 0) {
      if (n != 0 && v.dim() != n) throw ArgumentError("compose: inner jets disagree on dimension");
      n = v.dim();
    }
    order = std::min(order, v.order());
  }
  Jet2 r = Jet2::constant(n, outer.value());
  if (outer.dim() == 0) {
    r.set_order(order);
    return r;
  }
  for (int a = 0; a < n; ++a) {
    double g = 0.0;
    for (int i = 0; i < m; ++i) g += outer.grad(i) * inner[i].grad(a);
    r.set_grad(a, g);
  }
  if (order >= 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b <= a; ++b) {
        double h = 0.0;
        for (int i = 0; i < m; ++i) {
          const double gia = inner[i].grad(a);
          const double gib = inner[i].grad(b);
          h += outer.grad(i) * inner[i].hess(a, b);
          for (int j = 0; j < m; ++j) h += outer.hess(i, j) * gia * inner[j].grad(b);
          (void)gib;
        }
        r.set_hess(a, b, h);
      }
    }
  }
  r.set_order(order);
  return r;
}

Jet2 embed(const Jet2& jet, int offset, int new_dim) {
  if (jet.dim() == 0) {
    Jet2 r = Jet2::constant(new_dim, jet.value());
    r.set_order(jet.order());
    return r;
  }
  if (offset < 0 || offset + jet.dim() > new_dim || new_dim > kMaxDim) {
    throw ArgumentError("embed: target chart too small");
  }
  Jet2 r = Jet2::constant(new_dim, jet.value());
  for (int i = 0; i < jet.dim(); ++i) r.grad_[offset + i] = jet.grad_[i];
  for (int i = 0; i < jet.dim(); ++i)
    for (int j = 0; j <= i; ++j)
      r.hess_[Jet2::packed_index(offset + i, offset + j)] = jet.hess_[Jet2::packed_index(i, j)];
  r.order_ = jet.order_;
  return r;
}

double max_abs_difference(const Jet2& a, const Jet2& b) {
  const int n = std::max(a.dim(), b.dim());
  double m = std::abs(a.value() - b.value());
  auto g = [](const Jet2& j, int i) { return i < j.dim() ? j.grad(i) : 0.0; };
  auto h = [](const Jet2& j, int i, int k) { return i < j.dim() && k < j.dim() ? j.hess(i, k) : 0.0; };
  if (std::min(a.order(), b.order()) >= 1)
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(g(a, i) - g(b, i)));
  if (std::min(a.order(), b.order()) >= 2)
    for (int i = 0; i < n; ++i)
      for (int k = 0; k <= i; ++k) m = std::max(m, std::abs(h(a, i, k) - h(b, i, k)));
  return m;
}

}  // namespace qklab
