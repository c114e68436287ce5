#include <gtest/gtest.h>

#include <cmath>

#include "qklab/reduction.hpp"

using namespace qklab;

namespace {

HKData radial_base() { return flat_base(1, false, FlatPotentials::radial); }

HKData with_field(HKData b, const VectorField& x) {
  b.killing = x;
  return b;
}

double metric_diff(const MetricField& a, const MetricField& b, const std::vector<ChartPoint>& pts) {
  double m = 0.0;
  for (const auto& p : pts) m = std::max(m, (a(p).values() - b(p).values()).cwiseAbs().maxCoeff());
  return m;
}

double form_diff(const KFormField& a, const KFormField& b, const std::vector<ChartPoint>& pts) {
  return form_residual(a - b, pts).value;
}

SpaceModel n_over(const LiftedAction& act) { return build_bundle(act.base, BundleModel::N); }

struct Example1 {
  PermutingFibration fib = example1_fibration(2.0);
  QuotientFrame frame = quotient_frame(fib, 0.4);
};

const Example1& example1() {
  static const Example1 e;
  return e;
}

// Level-set chart (y1, x1..x4) at moderate radius.
Box level_box() { return Box{{-1.0, -0.4, -0.4, -0.4, -0.4}, {1.0, 0.4, 0.4, 0.4, 0.4}}; }

}  // namespace

TEST(Lift, PermutingRotationAccepted) {
  const LiftedAction act = build_lift(with_field(radial_base(), flat_permuting_field()), KillingKind::permuting, {2, 0, 0});
  const SpaceModel n = n_over(act);
  EXPECT_LE(lift_invariance_residual(act, n, sample_points(n.domain, 20, 1)).value, 1e-9);
}

TEST(Lift, TriholomorphicAccepted) {
  const LiftedAction act = build_lift(with_field(radial_base(), flat_triholomorphic_field()), KillingKind::triholomorphic);
  const SpaceModel n = n_over(act);
  EXPECT_LE(lift_invariance_residual(act, n, sample_points(n.domain, 20, 2)).value, 1e-9);
}

TEST(Lift, HomotheticAndVerticalPreserveOmega) {
  for (const LiftedAction& act :
       {build_lift(with_field(radial_base(), flat_homothetic_field(4)), KillingKind::homothetic),
        build_lift(radial_base(), KillingKind::vertical, {1, 2, 3})}) {
    const SpaceModel n = n_over(act);
    EXPECT_LE(lift_invariance_residual(act, n, sample_points(n.domain, 20, 3)).value, 1e-9)
        << to_string(act.kind);
  }
}

TEST(Lift, RejectsMisdeclaredKind) {
  EXPECT_THROW(build_lift(with_field(radial_base(), flat_homothetic_field(4)), KillingKind::triholomorphic),
               ConstructionError);
  EXPECT_THROW(build_lift(with_field(radial_base(), flat_triholomorphic_field()), KillingKind::permuting),
               ConstructionError);
}

TEST(Lift, RejectsMissingField) {
  EXPECT_THROW(build_lift(radial_base(), KillingKind::permuting), ConstructionError);
}

TEST(Lift, ProjectsToBaseField) {
  const LiftedAction act = build_lift(with_field(radial_base(), flat_permuting_field()), KillingKind::permuting, {2, 0, 0});
  for (const auto& pt : sample_points(n_over(act).domain, 5, 4)) {
    const auto lift = act.lift(pt);
    const std::vector<double> bp(pt.coords().begin() + 4, pt.coords().end());
    const auto base = act.base_field(ChartPoint(bp));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(lift[4 + i].value(), base[i].value(), 1e-15);
    EXPECT_NEAR(lift[0].value(), 0.0, 1e-15);
    EXPECT_NEAR(lift[1].value(), -1.0, 1e-15);
    EXPECT_NEAR(lift[2].value(), -2.0 * pt[3], 1e-15);
    EXPECT_NEAR(lift[3].value(), 2.0 * pt[2], 1e-15);
  }
}

TEST(Lift, PermutingPotentialConvention) {
  const HKData b = adapt_potentials(with_field(radial_base(), flat_permuting_field()), KillingKind::permuting);
  const auto pts = sample_points(b.domain, 5, 5);
  EXPECT_LE(form_diff((*b.kappa)[1], 0.5 * interior_product(*b.killing, b.sigma[2]), pts), 1e-15);
  EXPECT_LE(form_diff((*b.kappa)[2], -0.5 * interior_product(*b.killing, b.sigma[1]), pts), 1e-15);
  EXPECT_LE(potential_residual(b, pts).value, 1e-12);
}

TEST(MomentMap, AllKindsOnFlatN8) {
  const HKData base = radial_base();
  const std::vector<std::pair<const char*, LiftedAction>> cases = {
      {"vertical", build_lift(base, KillingKind::vertical, {1, 2, 3})},
      {"triholomorphic", build_lift(with_field(base, flat_triholomorphic_field()), KillingKind::triholomorphic)},
      {"permuting", build_lift(with_field(base, flat_permuting_field()), KillingKind::permuting, {2, 0, 0})},
      {"homothetic", build_lift(with_field(base, flat_homothetic_field(4)), KillingKind::homothetic)},
  };
  for (const auto& [name, act] : cases) {
    const SpaceModel n = n_over(act);
    const MomentMapData m = moment_map(act, n, 50, 6, 1e-9);
    EXPECT_LE(m.residual.value, 1e-9) << name;
  }
}

TEST(MomentMap, VerticalClosedForm) {
  const LiftedAction act = build_lift(radial_base(), KillingKind::vertical, {1, 2, 3});
  const SpaceModel n = n_over(act);
  const MomentMapData m = moment_map(act, n);
  for (const auto& pt : sample_points(n.domain, 10, 7)) {
    const double e2t = std::exp(2 * pt[0]);
    EXPECT_NEAR(m.components[0](pt).value(), e2t * 1.0, 1e-13);
    EXPECT_NEAR(m.components[1](pt).value(), e2t * 2.0, 1e-13);
    EXPECT_NEAR(m.components[2](pt).value(), e2t * 3.0, 1e-13);
  }
}

TEST(MomentMap, GeneralCombinationOmega1Coefficient) {
  const HKData base = radial_base();
  const double u = 0.7, v = -0.4, w = 1.3, a = 0.5;
  const LiftedAction act = combine_lifts({
      {u, build_lift(with_field(base, flat_homothetic_field(4)), KillingKind::homothetic)},
      {v, build_lift(with_field(base, flat_permuting_field()), KillingKind::permuting)},
      {w, build_lift(with_field(base, flat_triholomorphic_field()), KillingKind::triholomorphic)},
      {1.0, build_lift(base, KillingKind::vertical, {a, 0.2, -0.1})},
  });
  const SpaceModel n = n_over(act);
  const MomentMapData m = moment_map(act, n, 50, 8, 1e-9);
  EXPECT_LE(m.residual.value, 1e-9);
  for (const auto& pt : sample_points(n.domain, 30, 9)) {
    const double t = pt[0], y1 = pt[1];
    const double x1 = pt[4], x2 = pt[5], x3 = pt[6], x4 = pt[7];
    const double r2 = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4;
    const double expect = std::exp(2 * t) * (a + 2 * u * y1 - (v / 2) * (r2 + std::exp(-2 * t)) -
                                             (w / 2) * (x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4));
    EXPECT_NEAR(m.components[0](pt).value(), expect, 1e-12);
  }
}

TEST(MomentMap, TriholomorphicDependsOnBaseOnly) {
  const LiftedAction act =
      build_lift(with_field(radial_base(), flat_triholomorphic_field()), KillingKind::triholomorphic);
  const SpaceModel n = n_over(act);
  const MomentMapData m = moment_map(act, n);
  for (const auto& pt : sample_points(n.domain, 5, 10)) {
    std::vector<double> moved = pt.coords();
    moved[0] += 0.3;
    moved[1] -= 0.5;
    moved[2] += 0.2;
    moved[3] += 0.7;
    for (int i = 0; i < 3; ++i) {
      const double a = m.components[i](pt).value() * std::exp(-2 * pt[0]);
      const double b = m.components[i](ChartPoint(moved)).value() * std::exp(-2 * moved[0]);
      EXPECT_NEAR(a, b, 1e-13);
    }
  }
}

TEST(MomentMap, WrongModelThrows) {
  const LiftedAction act = build_lift(radial_base(), KillingKind::vertical, {1, 0, 0});
  EXPECT_THROW(moment_map(act, build_bundle(act.base, BundleModel::L)), ArgumentError);
}

TEST(ReducedMetric, HyperbolicConesAreEinstein) {
  for (auto which : {ReducedMetric::radial_R4, ReducedMetric::sasaki_link}) {
    const QuotientModel q = reduced_metric(which);
    const auto pts = sample_points(q.domain, 10, 11);
    EXPECT_LE(einstein_residual(q.metric, -12.0, pts).value, 1e-7) << q.name;
    for (const auto& pt : pts) EXPECT_NEAR(curvature(q.metric, pt).scalar, -48.0, 1e-6);
  }
}

TEST(ReducedMetric, ConeFormsAgree) {
  const QuotientModel a = reduced_metric(ReducedMetric::radial_R4);
  const QuotientModel b = reduced_metric(ReducedMetric::sasaki_link);
  EXPECT_LE(metric_diff(a.metric, b.metric, sample_points(a.domain, 10, 12)), 1e-14);
}

TEST(ReducedMetric, SphereCoframeStructure) {
  const auto g = sphere_coframe(0, 3);
  const auto pts = sample_points(Box{{0.4, -1, -1}, {2.7, 1, 1}}, 10, 13);
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(form_diff(exterior_derivative(g[i]), 2.0 * wedge(g[(i + 1) % 3], g[(i + 2) % 3]), pts), 1e-14);
}

TEST(ReducedMetric, RotationQuotientBothConstants) {
  for (double a : {0.0, 2.0}) {
    const QuotientModel q = reduced_metric(ReducedMetric::permuting_example1, {a});
    const auto pts = sample_points(q.domain, 10, 14);
    EXPECT_LE(einstein_residual(q.metric, -12.0, pts).value, 1e-7) << a;
    for (const auto& pt : pts) EXPECT_NEAR(curvature(q.metric, pt).scalar, -48.0, 1e-6);
  }
}

TEST(ReducedMetric, ConformalQuotientHyperbolic) {
  const QuotientModel q = reduced_metric(ReducedMetric::permuting_example2, {1.0});
  const auto pts = sample_points(q.domain, 10, 15);
  for (const auto& pt : pts) {
    double r2 = 0.0;
    for (int i = 0; i < 4; ++i) r2 += pt[i] * pt[i];
    EXPECT_LE(r2, 0.5);
    EXPECT_NEAR(curvature(q.metric, pt).scalar, -48.0, 1e-6);
  }
  EXPECT_LE(einstein_residual(q.metric, -12.0, pts).value, 1e-7);
}

TEST(ReducedMetric, GeneralFormulas) {
  for (auto which : {ReducedMetric::homothetic_general, ReducedMetric::permuting_general}) {
    const QuotientModel q = reduced_metric(which);
    EXPECT_LE(einstein_residual(q.metric, q.expected.at("lambda"), sample_points(q.domain, 10, 16)).value, 1e-7)
        << q.name;
  }
}

TEST(ReducedMetric, PositiveDefiniteOnDomain) {
  for (auto which : {ReducedMetric::radial_R4, ReducedMetric::permuting_example1, ReducedMetric::permuting_example2,
                     ReducedMetric::homothetic_general, ReducedMetric::permuting_general}) {
    const QuotientModel q = reduced_metric(which);
    for (const auto& pt : sample_points(q.domain, 10, 17)) EXPECT_TRUE(is_positive_definite(q.metric(pt).values()));
  }
}

TEST(ReducedMetric, DomainViolationThrows) {
  const QuotientModel q = reduced_metric(ReducedMetric::permuting_general, {0.1});
  EXPECT_THROW(q.metric(ChartPoint{0.1, 0.1, 0.6, 0.6}), EvaluationError);
}

TEST(ReducedMetric, BadParametersThrow) {
  EXPECT_THROW(reduced_metric(ReducedMetric::permuting_example1, {-1.0}), ArgumentError);
  EXPECT_THROW(reduced_metric(ReducedMetric::permuting_example2, {0.0}), ArgumentError);
  EXPECT_THROW(reduced_metric_from_string("nope"), ArgumentError);
  EXPECT_EQ(reduced_metric_from_string("sasaki_link"), ReducedMetric::sasaki_link);
}

class LevelSet : public ::testing::Test {
 protected:
  HKData base = example1_base();
  LiftedAction act = build_lift(base, KillingKind::permuting, {2, 0, 0});
  SpaceModel n = build_bundle(act.base, BundleModel::N);
  SpaceModel level = level_set_restrict(n, act);
};

TEST_F(LevelSet, MetricAndConnectionAtFixedPoint) {
  const std::vector<ChartPoint> pt{ChartPoint{0.3, 0.2, -0.3, 0.5, 0.4}};
  EXPECT_LE(metric_diff(level.metric, level_set_metric_formula(base, *base.killing, 2.0), pt), 1e-10);
  EXPECT_LE(form_diff(level.form("xi_X"), level_set_connection_formula(base, *base.killing, 2.0), pt), 1e-10);
}

TEST_F(LevelSet, MetricAndConnectionSampled) {
  const auto pts = sample_points(level_box(), 30, 18);
  EXPECT_LE(metric_diff(level.metric, level_set_metric_formula(base, *base.killing, 2.0), pts), 1e-10);
  EXPECT_LE(form_diff(level.form("xi_X"), level_set_connection_formula(base, *base.killing, 2.0), pts), 1e-10);
}

TEST_F(LevelSet, MomentMapVanishes) {
  const MomentMapData m = moment_map(act, n);
  const ScalarField p = permuting_potential(act.base, *base.killing);
  for (const auto& pt : sample_points(level_box(), 10, 19)) {
    const std::vector<double> bp(pt.coords().begin() + 1, pt.coords().end());
    const double t = -0.5 * std::log(2.0 - 2.0 * p(ChartPoint(bp)).value());
    std::vector<double> full{t, pt[0], 0.0, 0.0};
    full.insert(full.end(), bp.begin(), bp.end());
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.components[i](ChartPoint(full)).value(), 0.0, 1e-13);
  }
}

TEST_F(LevelSet, HorizontalFieldIsOrthogonal) {
  const VectorField x = level_set_action(act);
  for (const auto& pt : sample_points(level_box(), 10, 20)) {
    const std::vector<double> bp(pt.coords().begin() + 1, pt.coords().end());
    const double pv = permuting_potential(act.base, *base.killing)(ChartPoint(bp)).value();
    const double norm = inner(base.g, *base.killing, *base.killing)(ChartPoint(bp)).value();
    const double d = 2.0 - 2.0 * pv + norm;
    const auto xv = x(pt);
    std::vector<double> zh(level.dim, 0.0);
    zh[0] = 1.0;
    for (int i = 0; i < level.dim; ++i) zh[i] += 2.0 / d * xv[i].value();
    EXPECT_NEAR(level.form("xi_X")(pt).evaluate({zh}), 0.0, 1e-13);
  }
}

TEST_F(LevelSet, TwoPathReducedMetric) {
  const auto pts = sample_points(level_box(), 30, 21);
  const MetricField path1 = horizontal_part(level.metric, level_set_action(act));
  const MetricField path2 = permuting_reduced_formula(base, *base.killing, 2.0, true);
  EXPECT_LE(metric_diff(path1, path2, pts), 1e-9);
}

TEST_F(LevelSet, RejectsNonPermuting) {
  const LiftedAction v = build_lift(radial_base(), KillingKind::vertical, {1, 0, 0});
  EXPECT_THROW(level_set_restrict(build_bundle(v.base, BundleModel::N), v), ArgumentError);
}

TEST(Fibration, ExplicitJacobianAgrees) {
  const auto& e = example1();
  for (const auto& pt : sample_points(e.fib.domain, 10, 22)) EXPECT_LE(e.fib.to_n.jacobian_mismatch(pt), 1e-12);
}

TEST(Fibration, OmegaBarInvariantAlongAction) {
  const auto& e = example1();
  const auto w = fibred_omega_bar(e.fib);
  const VectorField dx = VectorField::coordinate(0, 5);
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(form_residual(lie_derivative(dx, w[i]), sample_points(e.fib.domain, 20, 23)).value, 1e-9) << i;
}

TEST(Frame, StructureEquations) {
  const auto& e = example1();
  EXPECT_LE(frame_residual(e.frame, sample_points(e.frame.quotient.domain, 30, 24)).value, 1e-8);
}

TEST(Frame, ZFlatRelations) {
  const auto& e = example1();
  EXPECT_LE(z_flat_residual(e.frame, sample_points(e.frame.quotient.domain, 30, 25)).value, 1e-8);
}

TEST(Frame, ZCurvatureProjection) {
  const auto& e = example1();
  const auto pts = sample_points(e.frame.quotient.domain, 30, 26);
  EXPECT_LE(z_curvature_residual(e.frame, pts).value, 1e-8);
  const ScalarField bz = as_function(interior_product(e.frame.z, e.frame.beta));
  for (const auto& pt : pts) EXPECT_NEAR(bz(pt).value(), 4.0 / (2.0 - 2.0 * pt[2]), 1e-12);
}

TEST(Frame, QuotientMetricIsHorizontalPart) {
  // ω̄ᵢ are compatible with g_red: g = ω̄₁(·, Ī₁·)
  const auto& e = example1();
  const MetricField& g = e.frame.quotient.metric;
  for (const auto& pt : sample_points(e.frame.quotient.domain, 10, 27)) {
    const Eigen::MatrixXd gv = g(pt).values();
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd w = two_form_matrix(e.frame.omega_bar[i](pt)).values();
      const Eigen::MatrixXd j = gv.inverse() * w.transpose();
      EXPECT_LE((j * j + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10) << i;
    }
  }
}

class Roundtrip : public ::testing::Test {
 protected:
  const Example1& e = example1();
  HKReconstruction hk = hkqk_inverse(e.frame);
  std::vector<ChartPoint> pts = sample_points(e.fib.domain, 30, 28);
};

TEST_F(Roundtrip, RecoversFlatTriple) {
  for (int i = 0; i < 3; ++i)
    EXPECT_LE(form_diff(hk.sigma[i], pullback(e.fib.to_base, e.fib.base.sigma[i]), pts), 1e-8) << i;
}

TEST_F(Roundtrip, RecoversFlatMetric) {
  EXPECT_LE(metric_diff(hk.g, pullback(e.fib.to_base, e.fib.base.g), pts), 1e-8);
}

TEST_F(Roundtrip, TripleClosedAndQuaternionic) {
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(form_residual(exterior_derivative(hk.sigma[i]), pts).value, 1e-9);
    for (int j = i + 1; j < 3; ++j) EXPECT_LE(form_residual(wedge(hk.sigma[i], hk.sigma[j]), pts).value, 1e-9);
  }
  EXPECT_LE(form_diff(wedge(hk.sigma[0], hk.sigma[0]), wedge(hk.sigma[1], hk.sigma[1]), pts), 1e-9);
  EXPECT_LE(form_diff(wedge(hk.sigma[0], hk.sigma[0]), wedge(hk.sigma[2], hk.sigma[2]), pts), 1e-9);
}

TEST_F(Roundtrip, PermutingActionOfDx) {
  const VectorField dx = VectorField::coordinate(0, hk.dim);
  EXPECT_LE(form_residual(lie_derivative(dx, hk.sigma[0]), pts).value, 1e-9);
  EXPECT_LE(form_diff(lie_derivative(dx, hk.sigma[1]), -2.0 * hk.sigma[2], pts), 1e-9);
  EXPECT_LE(form_diff(lie_derivative(dx, hk.sigma[2]), 2.0 * hk.sigma[1], pts), 1e-9);
}

TEST_F(Roundtrip, ZIsDegenerateDirection) {
  for (const auto& pt : pts) {
    const Eigen::MatrixXd g = hk.g(pt).values();
    const auto z = hk.z_lift(pt);
    Eigen::VectorXd zv(hk.dim);
    for (int i = 0; i < hk.dim; ++i) zv[i] = z[i].value();
    EXPECT_LE((g * zv).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RoundtripErrors, BrokenFrameRejected) {
  QuotientFrame f = example1().frame;
  f.beta = 2.0 * f.beta;
  EXPECT_THROW(hkqk_inverse(f), PreconditionError);
}
