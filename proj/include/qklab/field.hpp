#pragma once

// Scalar fields on coordinate charts, evaluated to second-order jets.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include "qklab/jet.hpp"

namespace qklab {

class ChartPoint {
 public:
  ChartPoint() = default;
  explicit ChartPoint(std::vector<double> coords);
  ChartPoint(std::initializer_list<double> coords);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  /// Jet of coordinate `index` at this point.
  Jet2 coordinate(int index) const { return Jet2::variable(dim(), index, coords_[index]); }
  /// All coordinate jets.
  std::vector<Jet2> coordinates() const;

 private:
  std::vector<double> coords_;
};

class ScalarField {
 public:
  using Eval = std::function<Jet2(const ChartPoint&)>;

  ScalarField() = default;
  ScalarField(int dim, Eval eval);

  static ScalarField constant(int dim, double value);

  int dim() const noexcept { return dim_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }

  /// Evaluates at `pt`; domain violations surface as EvaluationError.
  Jet2 operator()(const ChartPoint& pt) const;

 private:
  int dim_ = 0;
  Eval eval_;
};

/// Runs `fn`, converting DomainError into EvaluationError at `pt`.
template <typename F>
auto guarded(const ChartPoint& pt, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw EvaluationError(e.what(), pt.coords());
  }
}

ScalarField lift_coordinate(int index, int dim);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);
ScalarField operator+(const ScalarField& a, double c);
ScalarField operator*(double c, const ScalarField& a);

/// Applies a jet function pointwise: exp, log, sin, ...
ScalarField map(const ScalarField& a, Jet2 (*fn)(const Jet2&));
ScalarField pow(const ScalarField& a, double exponent);
ScalarField pow(const ScalarField& a, const ScalarField& b);

/// f(u_1, ..., u_m) where `outer` lives on an m-dimensional chart.
ScalarField compose(const ScalarField& outer, const std::vector<ScalarField>& inner);

/// Max |AD - central difference| over gradient and Hessian entries.
double finite_difference_check(const ScalarField& field, const ChartPoint& point, double h);

// -- sampling ---------------------------------------------------------------

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

Box uniform_box(int dim, double lo, double hi);

/// `count` points drawn uniformly from `box` with a mt19937_64 seeded by `seed`.
std::vector<ChartPoint> sample_points(const Box& box, int count, std::uint64_t seed);

struct Residual {
  double value = 0.0;
  std::vector<double> worst_point;

  void absorb(double r, const ChartPoint& pt);
  void absorb(const Residual& other);
};

/// Max of `fn` over the points; fn returns a nonnegative residual.
Residual max_residual(const std::vector<ChartPoint>& pts,
                      const std::function<double(const ChartPoint&)>& fn);

}  // namespace qklab
