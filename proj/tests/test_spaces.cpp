#include <gtest/gtest.h>

#include <cmath>

#include "qklab/curvature.hpp"
#include "qklab/spaces.hpp"

using namespace qklab;

namespace {

KFormField dx(int dim, std::vector<int> idx) { return KFormField::basis(dim, std::move(idx)); }

double diff_over(const KFormField& a, const KFormField& b, const std::vector<ChartPoint>& pts) {
  return form_residual(a - b, pts).value;
}

std::vector<ChartPoint> pts_of(const SpaceModel& m, int n, std::uint64_t seed) {
  return sample_points(m.domain, n, seed);
}

}  // namespace

TEST(FlatBase, StandardTriple) {
  const HKData b = flat_base(1);
  const auto pts = sample_points(b.domain, 5, 1);
  EXPECT_EQ(diff_over(b.sigma[0], dx(4, {0, 1}) + dx(4, {2, 3}), pts), 0.0);
  EXPECT_EQ(diff_over(b.sigma[1], dx(4, {0, 2}) + dx(4, {3, 1}), pts), 0.0);
  EXPECT_EQ(diff_over(b.sigma[2], dx(4, {0, 3}) + dx(4, {1, 2}), pts), 0.0);
}

TEST(FlatBase, PotentialsAndInvariants) {
  for (int n : {1, 2}) {
    for (auto pot : {FlatPotentials::standard, FlatPotentials::radial}) {
      const HKData b = flat_base(n, false, pot);
      const auto pts = sample_points(b.domain, 10, 2);
      EXPECT_LE(potential_residual(b, pts).value, 1e-12);
      EXPECT_LE(hk_invariants_residual(b, pts).value, 1e-12);
    }
  }
}

TEST(FlatBase, AlgebraicRelations) {
  const HKData b = flat_base(1);
  const auto pts = sample_points(b.domain, 5, 3);
  EXPECT_LE(form_residual(wedge(b.sigma[0], b.sigma[1]), pts).value, 1e-15);
  EXPECT_LE(diff_over(wedge(b.sigma[0], b.sigma[0]), wedge(b.sigma[1], b.sigma[1]), pts), 1e-15);
}

TEST(FlatBase, RejectsZeroDimension) { EXPECT_THROW(flat_base(0), ArgumentError); }

TEST(GibbonsHawking, LinearPotentialIsRicciFlatHK) {
  const HKData gh = gibbons_hawking_linear();
  const auto pts = sample_points(gh.domain, 10, 4);
  EXPECT_LE(hk_invariants_residual(gh, pts).value, 1e-10);
  EXPECT_LE(potential_residual(gh, pts).value, 1e-10);
  EXPECT_LE(einstein_residual(gh.g, 0.0, pts).value, 1e-8);
}

TEST(GibbonsHawking, ConstantPotentialIsFlat) {
  const KFormField theta = dx(4, {0});
  const HKData gh = gibbons_hawking(ScalarField::constant(3, 1.0), theta);
  const CurvatureAtPoint c = curvature(gh.g, ChartPoint{0.1, 0.8, 0.2, -0.3});
  for (double v : c.riemann) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(GibbonsHawking, RejectsNonHarmonic) {
  const ScalarField u1 = lift_coordinate(0, 3);
  const KFormField theta = dx(4, {0}) + lift_coordinate(3, 4) * dx(4, {2});
  EXPECT_THROW(gibbons_hawking(u1 * u1, theta), ConstructionError);
}

TEST(GibbonsHawking, RejectsWrongConnection) {
  EXPECT_THROW(gibbons_hawking(lift_coordinate(0, 3), dx(4, {0})), ConstructionError);
}

TEST(Bundles, MissingPotentialsThrow) {
  HKData b = flat_base(1);
  b.kappa.reset();
  EXPECT_THROW(build_bundle(b, BundleModel::N), ArgumentError);
}

TEST(Bundles, QIsWarpedProduct) {
  const HKData b = flat_base(1);
  const SpaceModel q = build_bundle(b, BundleModel::Q);
  for (const auto& pt : pts_of(q, 5, 5)) {
    Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(5, 5) * std::exp(2 * pt[0]);
    expect(0, 0) = 1.0;
    EXPECT_LE((q.metric(pt).values() - expect).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Bundles, ClosedFourFormOnFlatAndGH) {
  for (const HKData& b : {flat_base(1), gibbons_hawking_linear()}) {
    const SpaceModel n = build_bundle(b, BundleModel::N);
    EXPECT_LE(form_residual(exterior_derivative(n.form("Omega")), pts_of(n, 20, 6)).value, 1e-10) << b.name;
  }
}

TEST(Bundles, StructureEquationsFlatAndGH) {
  const SpaceModel flat_n = build_bundle(flat_base(1), BundleModel::N);
  EXPECT_LE(structure_equation_residual(flat_n, pts_of(flat_n, 30, 7)).value, 1e-10);
  const SpaceModel gh_n = build_bundle(gibbons_hawking_linear(), BundleModel::N);
  EXPECT_LE(structure_equation_residual(gh_n, pts_of(gh_n, 30, 8)).value, 1e-9);
}

TEST(Bundles, DroppingKappa2BreaksStructureEquations) {
  HKData b = flat_base(1);
  (*b.kappa)[1] = KFormField::zero(4, 1);
  const SpaceModel n = build_bundle(b, BundleModel::N);
  EXPECT_GT(structure_equation_residual(n, pts_of(n, 5, 9)).value, 0.1);
}

TEST(Bundles, KahlerFormOfP) {
  const SpaceModel p = build_bundle(flat_base(1), BundleModel::P);
  const auto pts = pts_of(p, 20, 10);
  EXPECT_LE(form_residual(exterior_derivative(p.form("omega_P")), pts).value, 1e-10);
  // ω_P = −½ d(dt∘J)
  const EndomorphismField j = acs_from_pair(p.metric, p.form("omega_P"));
  const KFormField ddc = exterior_derivative(precompose(p.form("dt"), j));
  EXPECT_LE(diff_over(-0.5 * ddc, p.form("omega_P"), pts), 1e-10);
}

TEST(Bundles, RicciFormOfP) {
  // ρ(X, Y) = Ric(JX, Y) equals dd^c log(p^{2n+1} p′) = 4 dd^c t for p = e^t, n = 1
  const SpaceModel p = build_bundle(flat_base(1), BundleModel::P);
  const EndomorphismField j = acs_from_pair(p.metric, p.form("omega_P"));
  const KFormField rho = 4.0 * exterior_derivative(precompose(p.form("dt"), j));
  for (const auto& pt : pts_of(p, 5, 11)) {
    const Eigen::MatrixXd jm = j(pt).values();
    const Eigen::MatrixXd ric = curvature(p.metric, pt).ricci;
    const Eigen::MatrixXd r = jm.transpose() * ric;
    EXPECT_LE((r - two_form_matrix(rho(pt)).values()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Bundles, EinsteinConstantsAndExpectations) {
  const HKData b = flat_base(1);
  for (auto [which, lambda] : {std::pair{BundleModel::Q, -4.0}, std::pair{BundleModel::P, -8.0},
                               std::pair{BundleModel::L, -12.0}, std::pair{BundleModel::N, -16.0}}) {
    const SpaceModel m = build_bundle(b, which);
    EXPECT_EQ(m.expect("lambda"), lambda);
    EXPECT_LE(einstein_residual(m.metric, lambda, pts_of(m, 5, 12)).value, 1e-7) << to_string(which);
  }
}

TEST(Bundles, NoLambdaForArbitraryProfiles) {
  ProfileSet ps = exponential_profiles();
  ps.rate.reset();
  const SpaceModel m = build_bundle(flat_base(1), BundleModel::N, ps);
  EXPECT_THROW(m.expect("lambda"), ArgumentError);
}

TEST(Bundles, QuaternionicTripleAndCompatibility) {
  const SpaceModel n = build_bundle(gibbons_hawking_linear(), BundleModel::N);
  const auto pts = pts_of(n, 10, 13);
  EXPECT_LE(quaternionic_residual(n, pts).value, 1e-9);
  for (const auto& pt : pts) {
    const Eigen::MatrixXd g = n.metric(pt).values();
    for (const char* w : {"omega1", "omega2", "omega3"}) {
      const Eigen::MatrixXd om = two_form_matrix(n.form(w)(pt)).values();
      const Eigen::MatrixXd i = acs_from_pair(n.metric, n.form(w))(pt).values();
      // g(X, Y) = ω(X, I Y)
      EXPECT_LE((om * i - g).cwiseAbs().maxCoeff(), 1e-9) << w;
    }
  }
}

TEST(Bundles, RiemannianSubmersion) {
  const HKData b = flat_base(1);
  for (auto which : {BundleModel::Q, BundleModel::P, BundleModel::L, BundleModel::N}) {
    const SpaceModel m = build_bundle(b, which);
    EXPECT_LE(submersion_residual(m, b, pts_of(m, 10, 14)).value, 1e-12);
  }
}

TEST(Bundles, ConformalBalanced) {
  const SpaceModel n = build_bundle(flat_base(1), BundleModel::N);
  EXPECT_LE(balanced_check(n, "omega1_conformal", 3, pts_of(n, 20, 15)).value, 1e-10);
  EXPECT_GT(balanced_check(n, "omega1", 3, pts_of(n, 3, 15)).value, 1e-3);
}

TEST(Bundles, UnknownFormThrows) {
  const SpaceModel n = build_bundle(flat_base(1), BundleModel::N);
  EXPECT_THROW(balanced_check(n, "nope", 2, pts_of(n, 1, 1)), ArgumentError);
}

TEST(Hypercomplex, ConnectionShapeOnTorus) {
  const SpaceModel m = build_hypercomplex(flat_base(1, true), HypercomplexShape::connection,
                                          {flat_asd_potentials()[0]});
  const auto pts = pts_of(m, 20, 16);
  for (const char* w : {"Upsilon1", "Upsilon2", "Upsilon3"})
    EXPECT_LE(form_residual(exterior_derivative(m.complex_form(w)), pts).value, 1e-10) << w;
  EXPECT_LE(quaternionic_residual(m, pts).value, 1e-9);
}

TEST(Hypercomplex, ConnectionShapeIsNotBalanced) {
  const SpaceModel m = build_hypercomplex(flat_base(1, true), HypercomplexShape::connection,
                                          {flat_asd_potentials()[0]});
  EXPECT_GT(balanced_check(m, "omega1", 3, pts_of(m, 5, 17)).value, 0.1);
}

TEST(Hypercomplex, AbelianShapeBalanced) {
  const auto nu = flat_asd_potentials();
  const SpaceModel m =
      build_hypercomplex(flat_base(1, true), HypercomplexShape::abelian, {nu[0], nu[1], nu[2]});
  const auto pts = pts_of(m, 20, 18);
  EXPECT_LE(balanced_check(m, "omega1", 3, pts).value, 1e-10);
  EXPECT_LE(form_residual(exterior_derivative(m.complex_form("Upsilon1")), pts).value, 1e-10);
  for (const char* w : {"omega1", "omega2", "omega3"})
    for (const auto& pt : pts_of(m, 5, 19))
      EXPECT_LE(nijenhuis(acs_from_pair(m.metric, m.form(w)), pt), 1e-9);
}

TEST(Hypercomplex, ZeroPotentialsGiveProduct) {
  const KFormField z = KFormField::zero(4, 1);
  const SpaceModel m = build_hypercomplex(flat_base(1, true), HypercomplexShape::abelian, {z, z, z, z});
  for (const auto& pt : pts_of(m, 3, 20))
    for (const char* w : {"omega1", "omega2", "omega3"})
      EXPECT_EQ(nijenhuis(acs_from_pair(m.metric, m.form(w)), pt), 0.0);
}

TEST(Hypercomplex, RejectsSelfDualCurvature) {
  const HKData t4 = flat_base(1, true);
  EXPECT_THROW(build_hypercomplex(t4, HypercomplexShape::connection, {(*t4.kappa)[1]}), ConstructionError);
}

TEST(Hypercomplex, RejectsBadPotentialCount) {
  const HKData t4 = flat_base(1, true);
  EXPECT_THROW(build_hypercomplex(t4, HypercomplexShape::connection, {}), ArgumentError);
  const KFormField z = KFormField::zero(4, 1);
  EXPECT_THROW(build_hypercomplex(t4, HypercomplexShape::abelian, {z, z, z, z, z}), ArgumentError);
}

TEST(Balanced, XiEtaModel) {
  const SpaceModel m = build_balanced_xi_eta(flat_base(1, true));
  const auto pts = pts_of(m, 20, 21);
  EXPECT_LE(balanced_check(m, "omega", 2, pts).value, 1e-10);
  EXPECT_LE(form_residual(exterior_derivative(m.complex_form("Upsilon")), pts).value, 1e-10);
}

TEST(RicciFlat, Specials) {
  const HKData t4 = flat_base(1, true);
  for (auto which : {RicciFlatSpecial::calabi_P, RicciFlatSpecial::as_G2_L7, RicciFlatSpecial::spin7_N8}) {
    const SpaceModel m = ricci_flat_special(t4, which);
    EXPECT_EQ(m.expect("lambda"), 0.0);
    EXPECT_LE(einstein_residual(m.metric, 0.0, pts_of(m, 4, 22)).value, 1e-7) << m.name;
  }
}

TEST(RicciFlat, CalabiAtSampleTimes) {
  const SpaceModel m = ricci_flat_special(flat_base(1, true), RicciFlatSpecial::calabi_P);
  std::vector<ChartPoint> pts;
  for (double t : {0.5, 1.0, 2.0}) pts.push_back(ChartPoint{t, 0.2, 0.1, -0.3, 0.4, 0.5});
  EXPECT_LE(einstein_residual(m.metric, 0.0, pts).value, 1e-7);
}

TEST(RicciFlat, G2MetricMatchesFormula) {
  const SpaceModel m = ricci_flat_special(flat_base(1, true), RicciFlatSpecial::as_G2_L7, 1.0);
  const ChartPoint pt{1.3, 0.1, 0.2, 0.3, -0.2, 0.1, 0.4};
  const double t = pt[0], tb = t + 1.0;
  const Eigen::MatrixXd g = m.metric(pt).values();
  EXPECT_NEAR(g(0, 0), t * t * tb * tb, 1e-12);
  EXPECT_NEAR(g(1, 1), 1.0 / (t * t), 1e-12);
  EXPECT_NEAR(g(2, 2), 1.0 / (tb * tb), 1e-12);
}

TEST(RicciFlat, NonpositiveTimeFails) {
  const SpaceModel m = ricci_flat_special(flat_base(1, true), RicciFlatSpecial::as_G2_L7);
  EXPECT_THROW(m.metric(ChartPoint{-0.5, 0, 0, 0, 0, 0, 0}), EvaluationError);
}

TEST(RicciFlat, RejectsNonpositiveConstants) {
  EXPECT_THROW(ricci_flat_special(flat_base(1, true), RicciFlatSpecial::spin7_N8, 1.0, -1.0), ArgumentError);
}

TEST(Holonomy, ExpectedValues) {
  const HKData b = flat_base(1);
  EXPECT_EQ(build_bundle(b, BundleModel::Q).expect("holonomy_dim"), 10);
  EXPECT_EQ(build_bundle(b, BundleModel::P).expect("holonomy_dim"), 9);
  EXPECT_EQ(build_bundle(b, BundleModel::L).expect("holonomy_dim"), 21);
  EXPECT_EQ(build_bundle(b, BundleModel::N).expect("holonomy_dim"), 13);
}
