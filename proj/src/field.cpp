#include "qklab/field.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

namespace qklab {

ChartPoint::ChartPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty() || static_cast<int>(coords_.size()) > kMaxDim) {
    throw ArgumentError("chart point dimension must lie in 1.." + std::to_string(kMaxDim));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ArgumentError("chart point has a non-finite coordinate");
  }
}

ChartPoint::ChartPoint(std::initializer_list<double> coords)
    : ChartPoint(std::vector<double>(coords)) {}

std::vector<Jet2> ChartPoint::coordinates() const {
  std::vector<Jet2> out;
  out.reserve(coords_.size());
  for (int i = 0; i < dim(); ++i) out.push_back(coordinate(i));
  return out;
}

ScalarField::ScalarField(int dim, Eval eval) : dim_(dim), eval_(std::move(eval)) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("scalar field dimension out of range");
}

ScalarField ScalarField::constant(int dim, double value) {
  return ScalarField(dim, [dim, value](const ChartPoint&) { return Jet2::constant(dim, value); });
}

Jet2 ScalarField::operator()(const ChartPoint& pt) const {
  if (pt.dim() != dim_) throw ArgumentError("chart point dimension does not match the field");
  return guarded(pt, [&] { return eval_(pt); });
}

ScalarField lift_coordinate(int index, int dim) {
  if (index < 0 || index >= dim) throw ArgumentError("lift_coordinate: index out of range");
  return ScalarField(dim, [index](const ChartPoint& pt) { return pt.coordinate(index); });
}

namespace {

int common_dim(const ScalarField& a, const ScalarField& b) {
  if (a.dim() != b.dim()) throw ArgumentError("scalar fields live on different charts");
  return a.dim();
}

template <typename Op>
ScalarField binary(const ScalarField& a, const ScalarField& b, Op op) {
  return ScalarField(common_dim(a, b), [a, b, op](const ChartPoint& pt) { return op(a(pt), b(pt)); });
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet2& x, const Jet2& y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet2& x, const Jet2& y) { return x - y; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet2& x, const Jet2& y) { return x * y; });
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet2& x, const Jet2& y) { return x / y; });
}
ScalarField operator-(const ScalarField& a) {
  return ScalarField(a.dim(), [a](const ChartPoint& pt) { return -a(pt); });
}
ScalarField operator+(const ScalarField& a, double c) {
  return ScalarField(a.dim(), [a, c](const ChartPoint& pt) { return a(pt) + Jet2(c); });
}
ScalarField operator*(double c, const ScalarField& a) {
  return ScalarField(a.dim(), [a, c](const ChartPoint& pt) { return c * a(pt); });
}

ScalarField map(const ScalarField& a, Jet2 (*fn)(const Jet2&)) {
  return ScalarField(a.dim(), [a, fn](const ChartPoint& pt) { return fn(a(pt)); });
}

ScalarField pow(const ScalarField& a, double exponent) {
  return ScalarField(a.dim(), [a, exponent](const ChartPoint& pt) { return pow(a(pt), exponent); });
}

ScalarField pow(const ScalarField& a, const ScalarField& b) {
  return binary(a, b, [](const Jet2& x, const Jet2& y) { return pow(x, y); });
}

ScalarField compose(const ScalarField& outer, const std::vector<ScalarField>& inner) {
  if (static_cast<int>(inner.size()) != outer.dim()) {
    throw ArgumentError("compose: need one inner field per outer coordinate");
  }
  const int dim = inner.front().dim();
  for (const auto& f : inner) {
    if (f.dim() != dim) throw ArgumentError("compose: inner fields on different charts");
  }
  return ScalarField(dim, [outer, inner](const ChartPoint& pt) {
    std::vector<Jet2> vals;
    std::vector<double> coords;
    for (const auto& f : inner) {
      vals.push_back(f(pt));
      coords.push_back(vals.back().value());
    }
    return compose(outer(ChartPoint(coords)), vals);
  });
}

double finite_difference_check(const ScalarField& field, const ChartPoint& point, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite_difference_check: step must be positive");
  const int n = point.dim();
  const Jet2 ad = field(point);
  auto at = [&](int i, double di, int j, double dj) {
    std::vector<double> c = point.coords();
    if (i >= 0) c[i] += di;
    if (j >= 0) c[j] += dj;
    return field(ChartPoint(c)).value();
  };
  const double f0 = ad.value();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = (at(i, h, -1, 0) - at(i, -h, -1, 0)) / (2 * h);
    worst = std::max(worst, std::abs(g - ad.grad(i)));
    if (ad.order() < 2) continue;
    const double hii = (at(i, h, -1, 0) - 2 * f0 + at(i, -h, -1, 0)) / (h * h);
    worst = std::max(worst, std::abs(hii - ad.hess(i, i)));
    for (int j = 0; j < i; ++j) {
      const double hij =
          (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
      worst = std::max(worst, std::abs(hij - ad.hess(i, j)));
    }
  }
  return worst;
}

Box uniform_box(int dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

std::vector<ChartPoint> sample_points(const Box& box, int count, std::uint64_t seed) {
  if (box.lo.size() != box.hi.size()) throw ArgumentError("sample box bounds differ in length");
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> c(box.lo.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
      c[i] = box.lo[i] == box.hi[i] ? box.lo[i] : u(rng);
    }
    pts.emplace_back(std::move(c));
  }
  return pts;
}

void Residual::absorb(double r, const ChartPoint& pt) {
  if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
  if (worst_point.empty() || r > value) {
    value = r;
    worst_point = pt.coords();
  }
}

void Residual::absorb(const Residual& other) {
  if (worst_point.empty() || other.value > value) {
    value = other.value;
    worst_point = other.worst_point;
  }
}

Residual max_residual(const std::vector<ChartPoint>& pts,
                      const std::function<double(const ChartPoint&)>& fn) {
  Residual r;
  for (const auto& pt : pts) r.absorb(fn(pt), pt);
  return r;
}

}  // namespace qklab
