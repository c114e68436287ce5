#include <gtest/gtest.h>

#include <cmath>

#include "qklab/curvature.hpp"
#include "qklab/reduction.hpp"
#include "qklab/spaces.hpp"

using namespace qklab;

namespace {

MetricField round_sphere() {
  const ScalarField s = map(lift_coordinate(0, 2), qklab::sin);
  return square(KFormField::basis(2, {0})) + (s * s) * square(KFormField::basis(2, {1}));
}

// Γ^k_ij from central differences of metric values.
std::vector<double> fd_christoffel(const MetricField& g, const ChartPoint& pt, double h) {
  const int n = g.dim();
  std::vector<Eigen::MatrixXd> dg(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> a = pt.coords(), b = pt.coords();
    a[k] += h;
    b[k] -= h;
    dg[k] = (g(ChartPoint(a)).values() - g(ChartPoint(b)).values()) / (2 * h);
  }
  const Eigen::MatrixXd gi = g(pt).values().inverse();
  std::vector<double> out(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gi(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        out[(k * n + i) * n + j] = 0.5 * s;
      }
  return out;
}

EndomorphismField constant_endo(const Eigen::MatrixXd& m) {
  return EndomorphismField(static_cast<int>(m.rows()),
                           [m](const ChartPoint&) { return JetMatrix::from_values(m); });
}

const HKData& flat() {
  static const HKData b = flat_base(1);
  return b;
}

}  // namespace

TEST(Christoffel, FlatVanishes) {
  const CurvatureAtPoint c = curvature(MetricField::euclidean(4), ChartPoint{0.1, 0.2, 0.3, 0.4});
  for (double v : c.christoffel) EXPECT_EQ(v, 0.0);
  for (double v : c.riemann) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(c.scalar, 0.0);
}

TEST(Christoffel, WarpedQMetric) {
  const SpaceModel q = build_bundle(flat(), BundleModel::Q);
  const double t = 0.3;
  const CurvatureAtPoint c = christoffel(q.metric, ChartPoint{t, 0.1, -0.2, 0.3, 0.4});
  for (int i = 1; i <= 4; ++i) {
    EXPECT_NEAR(c.gamma(0, i, i), -std::exp(2 * t), 1e-12);
    EXPECT_NEAR(c.gamma(i, 0, i), 1.0, 1e-12);
  }
}

TEST(Christoffel, ConformalCriticalPoint) {
  const QuotientModel e2 = reduced_metric(ReducedMetric::permuting_example2, {1.0});
  const CurvatureAtPoint c = christoffel(e2.metric, ChartPoint{0, 0, 0, 0});
  for (double v : c.christoffel) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Christoffel, FiniteDifferenceOracle) {
  const SpaceModel n = build_bundle(gibbons_hawking_linear(), BundleModel::N);
  const QuotientModel ex1 = reduced_metric(ReducedMetric::permuting_example1, {2.0});
  for (const auto& [g, box] : {std::pair{n.metric, n.domain}, std::pair{ex1.metric, ex1.domain}}) {
    for (const auto& pt : sample_points(box, 3, 4)) {
      const auto exact = christoffel(g, pt).christoffel;
      const auto fd = fd_christoffel(g, pt, 1e-4);
      for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(exact[i], fd[i], 1e-5);
    }
  }
}

TEST(Christoffel, MetricCompatibility) {
  const SpaceModel n = build_bundle(flat(), BundleModel::N);
  for (const auto& pt : sample_points(n.domain, 5, 5))
    EXPECT_LE(metric_compatibility_residual(n.metric, pt), 1e-10);
}

TEST(Christoffel, SingularMetricThrows) {
  const MetricField g(2, [](const ChartPoint&) { return JetMatrix::from_values(Eigen::Matrix2d::Zero()); });
  EXPECT_THROW(christoffel(g, ChartPoint{0.0, 0.0}), EvaluationError);
}

TEST(Curvature, RoundSphereScalar) {
  const CurvatureAtPoint c = curvature(round_sphere(), ChartPoint{0.9, 0.3});
  EXPECT_NEAR(c.scalar, 2.0, 1e-12);
  EXPECT_NEAR(c.ricci(0, 0), 1.0, 1e-12);
}

TEST(Curvature, BianchiAndSymmetries) {
  const SpaceModel n = build_bundle(gibbons_hawking_linear(), BundleModel::N);
  for (const auto& pt : sample_points(n.domain, 3, 6)) {
    const CurvatureAtPoint c = curvature(n.metric, pt);
    EXPECT_LE(c.bianchi_residual(), 1e-9);
    EXPECT_LE(c.antisymmetry_residual(), 1e-12);
    EXPECT_LE((c.ricci - c.ricci.transpose()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(c.scalar, (c.metric_inverse * c.ricci).trace(), 1e-9);
  }
}

TEST(Curvature, QRicciIsMinusFour) {
  const SpaceModel q = build_bundle(flat(), BundleModel::Q);
  const CurvatureAtPoint c = curvature(q.metric, ChartPoint{0.2, 0.1, 0.3, -0.4, 0.5});
  EXPECT_LE((c.ricci + 4.0 * c.metric).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Curvature, RotationQuotientScalarAtSamplePoint) {
  const QuotientModel ex1 = reduced_metric(ReducedMetric::permuting_example1, {2.0});
  EXPECT_NEAR(curvature(ex1.metric, ChartPoint{0.2, -0.3, 0.7, 0.1}).scalar, -48.0, 1e-8);
}

TEST(Einstein, BundleConstants) {
  for (auto [which, lambda] : {std::pair{BundleModel::N, -16.0}, std::pair{BundleModel::P, -8.0},
                               std::pair{BundleModel::L, -12.0}}) {
    const SpaceModel m = build_bundle(flat(), which);
    EXPECT_LE(einstein_residual(m.metric, lambda, sample_points(m.domain, 5, 7)).value, 1e-8)
        << to_string(which);
  }
}

TEST(Einstein, WrongConstantFails) {
  const SpaceModel m = build_bundle(flat(), BundleModel::N);
  EXPECT_GT(einstein_residual(m.metric, -15.0, sample_points(m.domain, 2, 8)).value, 0.5);
}

TEST(Einstein, ReportsWorstPoint) {
  const SpaceModel m = build_bundle(flat(), BundleModel::Q);
  const auto pts = sample_points(m.domain, 4, 9);
  const Residual r = einstein_residual(m.metric, -3.0, pts);
  EXPECT_EQ(r.worst_point.size(), 5u);
}

TEST(Killing, VerticalOnN) {
  const SpaceModel m = build_bundle(flat(), BundleModel::N);
  EXPECT_LE(killing_residual(m.metric, VectorField::coordinate(1, 8), sample_points(m.domain, 5, 10)).value,
            1e-12);
}

TEST(Killing, LiftedPermutingRotation) {
  HKData b = flat_base(1, false, FlatPotentials::radial);
  b.killing = flat_permuting_field();
  const LiftedAction act = build_lift(b, KillingKind::permuting);
  const SpaceModel m = build_bundle(act.base, BundleModel::N);
  EXPECT_LE(killing_residual(m.metric, act.lift, sample_points(m.domain, 5, 11)).value, 1e-9);
}

TEST(Killing, RadialFieldIsHomothetic) {
  const VectorField u = flat_homothetic_field(4);
  const auto pts = sample_points(uniform_box(4, -1, 1), 5, 12);
  EXPECT_NEAR(killing_residual(flat().g, u, pts).value, 2.0, 1e-14);
  EXPECT_LE(homothety_residual(flat().g, u, -2.0, pts).value, 1e-14);
}

TEST(Nijenhuis, ConstantStructure) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(4, 4);
  j(1, 0) = 1;
  j(0, 1) = -1;
  j(3, 2) = 1;
  j(2, 3) = -1;
  EXPECT_EQ(nijenhuis(constant_endo(j), ChartPoint{0.1, 0.2, 0.3, 0.4}), 0.0);
}

TEST(Nijenhuis, RejectsNonComplex) {
  EXPECT_THROW(nijenhuis(constant_endo(Eigen::MatrixXd::Identity(2, 2)), ChartPoint{0.0, 0.0}),
               PreconditionError);
}

TEST(Nijenhuis, HypercomplexIntegrable) {
  const HKData t4 = flat_base(1, true);
  const SpaceModel m = build_hypercomplex(t4, HypercomplexShape::connection, {flat_asd_potentials()[0]});
  for (const auto& pt : sample_points(m.domain, 10, 13))
    for (const char* w : {"omega1", "omega2", "omega3"})
      EXPECT_LE(nijenhuis(acs_from_pair(m.metric, m.form(w)), pt), 1e-9) << w;
}

TEST(Nijenhuis, SelfDualCurvatureBreaksIntegrability) {
  const HKData t4 = flat_base(1, true);
  const SpaceModel m =
      build_hypercomplex(t4, HypercomplexShape::connection, {(*t4.kappa)[1]}, /*validate=*/false);
  const ChartPoint pt{0.3, 0.1, -0.2, 0.4, 0.7, 0.2, -0.5, 0.6};
  double worst = 0.0;
  for (const char* w : {"omega1", "omega2", "omega3"})
    worst = std::max(worst, nijenhuis(acs_from_pair(m.metric, m.form(w)), pt));
  EXPECT_GT(worst, 0.1);
}

TEST(AcsFromPair, FlatSigma1) {
  const EndomorphismField j = acs_from_pair(flat().g, flat().sigma[0]);
  const Eigen::MatrixXd v = j(ChartPoint{0, 0, 0, 0}).values();
  // g(J·,·) = σ₁ gives J∂₁ = ∂₂ and J∂₃ = ∂₄
  EXPECT_DOUBLE_EQ(v(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(v(3, 2), 1.0);
  EXPECT_LE((v * v + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AcsFromPair, DegenerateFormThrows) {
  const EndomorphismField j = acs_from_pair(flat().g, KFormField::basis(4, {0, 1}));
  EXPECT_THROW(j(ChartPoint{0, 0, 0, 0}), IncompatibilityError);
}

TEST(AcsFromPair, OmegaOneOnN) {
  const SpaceModel m = build_bundle(flat(), BundleModel::N);
  const EndomorphismField j = acs_from_pair(m.metric, m.form("omega1"));
  for (const auto& pt : sample_points(m.domain, 5, 14)) {
    const Eigen::MatrixXd v = j(pt).values();
    EXPECT_LE(square_residual(j, pt), 1e-10);
    EXPECT_LE(hermitian_residual(m.metric, j, pt), 1e-10);
    // J∂_t = ½e^{−2t}∂_{y₁}
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(8);
    expect[1] = 0.5 * std::exp(-2.0 * pt[0]);
    EXPECT_LE((v.col(0) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AcsFromPair, QuaternionRelationsOnN) {
  const SpaceModel m = build_bundle(gibbons_hawking_linear(), BundleModel::N);
  EXPECT_LE(quaternionic_residual(m, sample_points(m.domain, 5, 15)).value, 1e-9);
}

TEST(Holonomy, FlatBaseBundles) {
  for (auto [which, dim] : {std::pair{BundleModel::Q, 10}, std::pair{BundleModel::P, 9},
                            std::pair{BundleModel::N, 13}}) {
    const SpaceModel m = build_bundle(flat(), which);
    EXPECT_EQ(holonomy_dim_estimate(m.metric, sample_points(m.domain, 1, 16)[0]), dim) << to_string(which);
  }
}

TEST(Holonomy, LBundleBoundedByExpected) {
  const SpaceModel m = build_bundle(flat(), BundleModel::L);
  const int d = holonomy_dim_estimate(m.metric, sample_points(m.domain, 1, 17)[0]);
  EXPECT_LE(d, 21);
  EXPECT_GT(d, 0);
}

TEST(Holonomy, FlatIsZero) {
  EXPECT_EQ(holonomy_dim_estimate(MetricField::euclidean(4), ChartPoint{0.1, 0.2, 0.3, 0.4}), 0);
}

TEST(Holonomy, LieClosureOfRotations) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3), b = Eigen::MatrixXd::Zero(3, 3);
  a(0, 1) = 1;
  a(1, 0) = -1;
  b(1, 2) = 1;
  b(2, 1) = -1;
  EXPECT_EQ(lie_closure_dim({a, b}), 3);
  EXPECT_EQ(lie_closure_dim({a}), 1);
}
