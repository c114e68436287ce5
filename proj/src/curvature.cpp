#include "qklab/curvature.hpp"

#include <cmath>

namespace qklab {

namespace {

int sq(int n) { return n * n; }

// dg[k](i,j) = ∂_k g_ij, ddg[k*n+l](i,j) = ∂_k∂_l g_ij.
struct MetricJets {
  int n = 0;
  Eigen::MatrixXd g;
  std::vector<Eigen::MatrixXd> dg;
  std::vector<Eigen::MatrixXd> ddg;
};

MetricJets read_jets(const MetricField& gf, const ChartPoint& pt, int order) {
  const JetMatrix m = gf.positive(pt);
  MetricJets j;
  j.n = gf.dim();
  const int n = j.n;
  j.g = m.values();
  j.dg.assign(n, Eigen::MatrixXd::Zero(n, n));
  if (order >= 2) j.ddg.assign(sq(n), Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet2& e = m(a, b);
      if (e.dim() == 0) continue;
      guarded(pt, [&] { e.require_order(order); });
      for (int k = 0; k < n; ++k) {
        j.dg[k](a, b) = e.grad(k);
        if (order >= 2)
          for (int l = 0; l < n; ++l) j.ddg[k * n + l](a, b) = e.hess(k, l);
      }
    }
  return j;
}

void fill_christoffel(const MetricJets& j, CurvatureAtPoint& c) {
  const int n = j.n;
  c.dim = n;
  c.metric = j.g;
  c.metric_inverse = j.g.inverse();
  c.christoffel.assign(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += c.metric_inverse(k, l) * (j.dg[a](l, b) + j.dg[b](l, a) - j.dg[l](a, b));
        c.christoffel[(k * n + a) * n + b] = 0.5 * s;
      }
}

}  // namespace

double CurvatureAtPoint::bianchi_residual() const {
  double r = 0.0;
  const int n = dim;
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v)
          r = std::max(r, std::abs(riem(a, s, m, v) + riem(a, m, v, s) + riem(a, v, s, m)));
  return r;
}

double CurvatureAtPoint::antisymmetry_residual() const {
  double r = 0.0;
  const int n = dim;
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v) r = std::max(r, std::abs(riem(a, s, m, v) + riem(a, s, v, m)));
  return r;
}

CurvatureAtPoint christoffel(const MetricField& g, const ChartPoint& pt) {
  CurvatureAtPoint c;
  fill_christoffel(read_jets(g, pt, 1), c);
  return c;
}

CurvatureAtPoint curvature(const MetricField& g, const ChartPoint& pt) {
  const MetricJets j = read_jets(g, pt, 2);
  CurvatureAtPoint c;
  fill_christoffel(j, c);
  const int n = j.n;
  const Eigen::MatrixXd& gi = c.metric_inverse;

  // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
  std::vector<Eigen::MatrixXd> dginv(n);
  for (int m = 0; m < n; ++m) dginv[m] = -gi * j.dg[m] * gi;

  // dGamma[m][(k*n + a)*n + b] = ∂_m Γ^k_ab
  std::vector<std::vector<double>> dgamma(n, std::vector<double>(n * n * n, 0.0));
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            const double first = j.dg[a](l, b) + j.dg[b](l, a) - j.dg[l](a, b);
            const double second =
                j.ddg[m * n + a](l, b) + j.ddg[m * n + b](l, a) - j.ddg[m * n + l](a, b);
            s += dginv[m](k, l) * first + gi(k, l) * second;
          }
          dgamma[m][(k * n + a) * n + b] = 0.5 * s;
          dgamma[m][(k * n + b) * n + a] = 0.5 * s;
        }

  c.riemann.assign(n * n * n * n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < n; ++m)
        for (int v = m + 1; v < n; ++v) {
          double val = dgamma[m][(r * n + v) * n + s] - dgamma[v][(r * n + m) * n + s];
          for (int l = 0; l < n; ++l)
            val += c.gamma(r, m, l) * c.gamma(l, v, s) - c.gamma(r, v, l) * c.gamma(l, m, s);
          c.riemann[((r * n + s) * n + m) * n + v] = val;
          c.riemann[((r * n + s) * n + v) * n + m] = -val;
        }

  c.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s)
    for (int v = 0; v < n; ++v) {
      double val = 0.0;
      for (int r = 0; r < n; ++r) val += c.riem(r, s, r, v);
      c.ricci(s, v) = val;
    }
  c.scalar = (gi.cwiseProduct(c.ricci)).sum();
  return c;
}

double metric_compatibility_residual(const MetricField& g, const ChartPoint& pt) {
  const MetricJets j = read_jets(g, pt, 1);
  CurvatureAtPoint c;
  fill_christoffel(j, c);
  const int n = j.n;
  double r = 0.0;
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = j.dg[k](a, b);
        for (int l = 0; l < n; ++l) v -= c.gamma(l, k, a) * j.g(l, b) + c.gamma(l, k, b) * j.g(a, l);
        r = std::max(r, std::abs(v));
      }
  return r;
}

Residual einstein_residual(const MetricField& g, double lambda, const std::vector<ChartPoint>& pts) {
  return max_residual(pts, [&](const ChartPoint& pt) {
    const CurvatureAtPoint c = curvature(g, pt);
    return (c.ricci - lambda * c.metric).cwiseAbs().maxCoeff();
  });
}

Residual killing_residual(const MetricField& g, const VectorField& x,
                          const std::vector<ChartPoint>& pts) {
  const MetricField lg = lie_derivative(x, g);
  return max_residual(pts, [&](const ChartPoint& pt) { return max_abs_value(lg(pt)); });
}

Residual homothety_residual(const MetricField& g, const VectorField& x, double c,
                            const std::vector<ChartPoint>& pts) {
  const MetricField lg = lie_derivative(x, g);
  return max_residual(pts, [&](const ChartPoint& pt) {
    return (lg(pt).values() - c * g(pt).values()).cwiseAbs().maxCoeff();
  });
}

double square_residual(const EndomorphismField& j, const ChartPoint& pt) {
  const Eigen::MatrixXd m = j(pt).values();
  return (m * m + Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

double nijenhuis(const EndomorphismField& jf, const ChartPoint& pt) {
  const JetMatrix jm = jf(pt);
  const int n = jf.dim();
  const Eigen::MatrixXd jv = jm.values();
  const double sqr = (jv * jv + Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (sqr > 1e-8) {
    throw PreconditionError("nijenhuis: J^2 != -Id at " + format_point(pt.coords()) +
                            " (residual " + std::to_string(sqr) + ")");
  }
  // dj[m](k, j) = ∂_m J^k_j
  std::vector<Eigen::MatrixXd> dj(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int b = 0; b < n; ++b) {
      const Jet2& e = jm(k, b);
      if (e.dim() == 0) continue;
      guarded(pt, [&] { e.require_order(1); });
      for (int m = 0; m < n; ++m) dj[m](k, b) = e.grad(m);
    }
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int b = i + 1; b < n; ++b) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) {
          v += jv(m, i) * dj[m](k, b) - jv(m, b) * dj[m](k, i);
          v -= jv(k, m) * (dj[i](m, b) - dj[b](m, i));
        }
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

JetMatrix two_form_matrix(const FormValue& w) {
  if (w.degree() != 2) throw ArgumentError("two_form_matrix expects a 2-form");
  const int n = w.dim();
  JetMatrix m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = Jet2::constant(n, 0.0);
  for (const auto& [mask, c] : w.terms()) {
    const auto idx = indices_of(mask);
    m(idx[0], idx[1]) = c;
    m(idx[1], idx[0]) = -1.0 * c;
  }
  return m;
}

EndomorphismField acs_from_pair(const MetricField& g, const KFormField& w) {
  if (w.degree() != 2) throw ArgumentError("acs_from_pair expects a 2-form");
  if (w.dim() != g.dim()) throw ArgumentError("acs_from_pair: metric and form on different charts");
  const int n = g.dim();
  return EndomorphismField(n, [g, w, n](const ChartPoint& pt) {
    const JetMatrix gi = inverse(g.positive(pt));
    // J^c_a = g^{cb} ω_ab = (g^{-1} Ω^T)^c_a
    const JetMatrix j = gi * two_form_matrix(w(pt)).transpose();
    const Eigen::MatrixXd v = j.values();
    const double r = (v * v + Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (r > 1e-8 * std::max(1.0, v.cwiseAbs().maxCoeff())) {
      throw IncompatibilityError("metric and 2-form do not define an almost complex structure",
                                 pt.coords());
    }
    return j;
  });
}

double hermitian_residual(const MetricField& g, const EndomorphismField& j, const ChartPoint& pt) {
  const Eigen::MatrixXd gv = g(pt).values();
  const Eigen::MatrixXd jv = j(pt).values();
  return (jv.transpose() * gv * jv - gv).cwiseAbs().maxCoeff();
}

int lie_closure_dim(const std::vector<Eigen::MatrixXd>& generators, double rel_tol) {
  if (generators.empty()) return 0;
  const int n = static_cast<int>(generators.front().rows());
  double scale = 0.0;
  for (const auto& g : generators) scale = std::max(scale, g.norm());
  if (scale == 0.0) return 0;

  std::vector<Eigen::VectorXd> basis;  // orthonormal, vectorized
  std::vector<Eigen::MatrixXd> elems;  // matching matrices (unit Frobenius norm)
  auto try_add = [&](const Eigen::MatrixXd& m, double ref) {
    const double norm = m.norm();
    if (norm <= rel_tol * ref) return false;
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()) / norm;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b.dot(v) * b;
    if (v.norm() <= rel_tol) return false;
    v.normalize();
    basis.push_back(v);
    elems.push_back(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n));
    return true;
  };

  // span of the generators, with rank decided by singular values
  Eigen::MatrixXd stack(n * n, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t k = 0; k < generators.size(); ++k)
    stack.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(generators[k].data(), n * n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= rel_tol * sv(0)) break;
    const Eigen::VectorXd u = svd.matrixU().col(k);
    try_add(Eigen::Map<const Eigen::MatrixXd>(u.data(), n, n), 1.0);
  }

  for (std::size_t done = 0; done < elems.size();) {
    const std::size_t end = elems.size();
    for (std::size_t a = 0; a < end; ++a)
      for (std::size_t b = std::max(a + 1, done); b < end; ++b) {
        // unit-norm operands, so brackets are measured against 1
        try_add(elems[a] * elems[b] - elems[b] * elems[a], 1.0);
      }
    done = end;
    if (elems.size() == end) break;
  }
  return static_cast<int>(basis.size());
}

int holonomy_dim_estimate(const MetricField& g, const ChartPoint& pt, double rel_tol) {
  const CurvatureAtPoint c = curvature(g, pt);
  const int n = c.dim;
  // orthonormal frame E = L^{-T} with g = L L^T; endomorphisms become skew
  const Eigen::MatrixXd l = c.metric.llt().matrixL();
  const Eigen::MatrixXd lt = l.transpose();
  const Eigen::MatrixXd lt_inv = lt.inverse();
  std::vector<Eigen::MatrixXd> gens;
  for (int m = 0; m < n; ++m)
    for (int v = m + 1; v < n; ++v) {
      Eigen::MatrixXd r(n, n);
      for (int a = 0; a < n; ++a)
        for (int s = 0; s < n; ++s) r(a, s) = c.riem(a, s, m, v);
      gens.push_back(lt * r * lt_inv);
    }
  return lie_closure_dim(gens, rel_tol);
}

}  // namespace qklab
