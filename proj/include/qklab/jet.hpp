#pragma once

// Second-order forward-mode jets over a chart of dimension <= kMaxDim.
//
// A Jet2 holds the value, gradient and Hessian of a scalar with respect to the
// chart coordinates. The Hessian is stored packed (lower triangle), so it is
// symmetric by construction. Every jet also carries the derivative order that
// is actually known: quantities obtained by differentiating a jet (the
// coefficients of an exterior derivative, a Jacobian entry, ...) lose one
// order. Arithmetic propagates the minimum order, and unknown derivative
// slots are kept at zero so that all entries stay finite.

#include <array>
#include <cstdint>
#include <span>

#include "qklab/errors.hpp"

namespace qklab {

inline constexpr int kMaxDim = 12;

class Jet2 {
 public:
  static constexpr int kPacked = kMaxDim * (kMaxDim + 1) / 2;

  /// The dimension-free zero. Dimension-0 jets act as constants in mixed
  /// arithmetic and adopt the dimension of the other operand.
  Jet2() = default;

  /// Dimension-0 constant.
  Jet2(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)

  static Jet2 constant(int dim, double value);
  /// Coordinate function x_index at a point where it takes `value`.
  static Jet2 variable(int dim, int index, double value);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  double value() const noexcept { return value_; }
  double grad(int i) const { return grad_[i]; }
  double hess(int i, int j) const { return hess_[packed_index(i, j)]; }

  /// Throws DomainError when fewer than `needed` derivative orders are known.
  void require_order(int needed) const;

  void set_value(double v) noexcept { value_ = v; }
  void set_grad(int i, double v) { grad_[i] = v; }
  void set_hess(int i, int j, double v) { hess_[packed_index(i, j)] = v; }
  void set_order(int order) noexcept { order_ = static_cast<std::int8_t>(order); }
  /// Zeroes derivative slots beyond order().
  void clear_unknown();

  Jet2& operator+=(const Jet2& other);
  Jet2& operator-=(const Jet2& other);
  Jet2& operator*=(const Jet2& other);
  Jet2& operator/=(const Jet2& other);
  Jet2& operator*=(double s);

  Jet2 operator-() const;

  /// Applies a scalar function given its value and first two derivatives at
  /// value(): f(u) with grad f'(u) du and hess f'(u) H + f''(u) du du^T.
  Jet2 apply(double f0, double f1, double f2) const;

  static constexpr int packed_index(int i, int j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }

 private:
  friend Jet2 embed(const Jet2& jet, int offset, int new_dim);

  void adopt_dim(const Jet2& other);

  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, kPacked> hess_{};
  std::int8_t dim_ = 0;
  std::int8_t order_ = 2;
};

Jet2 operator+(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a, const Jet2& b);
Jet2 operator*(Jet2 a, const Jet2& b);
Jet2 operator/(Jet2 a, const Jet2& b);
Jet2 operator*(Jet2 a, double s);
Jet2 operator*(double s, Jet2 a);

Jet2 exp(const Jet2& u);
Jet2 log(const Jet2& u);
Jet2 sin(const Jet2& u);
Jet2 cos(const Jet2& u);
Jet2 tan(const Jet2& u);
Jet2 sinh(const Jet2& u);
Jet2 cosh(const Jet2& u);
Jet2 tanh(const Jet2& u);
Jet2 sqrt(const Jet2& u);
Jet2 atan(const Jet2& u);
Jet2 acosh(const Jet2& u);
Jet2 reciprocal(const Jet2& u);
/// Integer powers are defined for every base (negative exponents need a
/// nonzero base).
Jet2 pow(const Jet2& u, int exponent);
/// Real exponents require a positive base unless the exponent is integral.
Jet2 pow(const Jet2& u, double exponent);
Jet2 pow(const Jet2& base, const Jet2& exponent);
Jet2 square(const Jet2& u);

/// d/dx_index of a jet: value grad(index), gradient row `index` of the
/// Hessian, one order fewer.
Jet2 partial(const Jet2& u, int index);

/// Chain rule for u = outer(inner_1, ..., inner_m): `outer` is a jet with
/// respect to the m target coordinates, each inner_i a jet with respect to
/// the source coordinates.
Jet2 compose(const Jet2& outer, std::span<const Jet2> inner);

/// Re-expresses a jet on a chart of dimension new_dim in which the original
/// coordinates occupy slots [offset, offset + dim).
Jet2 embed(const Jet2& jet, int offset, int new_dim);

/// Largest absolute difference over value, gradient and (if both are known)
/// Hessian entries.
double max_abs_difference(const Jet2& a, const Jet2& b);

}  // namespace qklab
