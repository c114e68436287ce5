#pragma once

// Lifts of Killing fields from a hyperKähler base to the N bundle, their
// quaternion-Kähler moment maps, closed-form reduced metrics, the geometry of
// the permuting level set, and the inverse reconstruction of the base.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qklab/curvature.hpp"
#include "qklab/spaces.hpp"

namespace qklab {

struct LiftConstants {
  double a = 0.0, b = 0.0, c = 0.0;
};

struct LiftedAction {
  KillingKind kind = KillingKind::vertical;
  bool combined = false;
  VectorField base_field;  // on the base chart
  VectorField lift;        // on the N chart (t, y1, y2, y3, base)
  LiftConstants constants;
  /// Total weight of permuting components; each contributes −½ ω₁ to the moment map.
  double permuting_weight = 0.0;
  /// Base with the potentials the lift is adapted to.
  HKData base;
};

/// Potentials adapted to the base Killing field: permuting fixes
/// κ₂ = ½ X⌟σ₃, κ₃ = −½ X⌟σ₂; homothetic sets κᵢ = −½ X⌟σᵢ.
HKData adapt_potentials(const HKData& base, KillingKind kind);

/// Checks the declared kind on the base and builds the lift:
/// triholomorphic X; permuting X − 2(y₃∂_{y₂} − y₂∂_{y₃}) − (a/2)∂_{y₁};
/// homothetic X − 2Σ yᵢ∂_{yᵢ} + ∂_t; vertical −a∂_{y₁} + b∂_{y₂} + c∂_{y₃}.
LiftedAction build_lift(const HKData& base, KillingKind kind, LiftConstants constants = {},
                        double tolerance = 1e-8);

/// Weighted sum of lifts sharing one base.
LiftedAction combine_lifts(const std::vector<std::pair<double, LiftedAction>>& terms);

struct MomentMapData {
  std::array<ScalarField, 3> components;  // coefficients of ω₁, ω₂, ω₃
  ScalarField mu_alpha, mu_xi, mu_eta;
  KFormField f;                           // Σ components_i ω_i
  Residual residual;                      // of df − X̃⌟Ω_N on the check sample
};

/// Moment map of a lift on an N model built over action.base.
MomentMapData moment_map(const LiftedAction& action, const SpaceModel& model, int samples = 20,
                         std::uint64_t seed = 11, double tolerance = 1e-8);

Residual moment_map_residual(const MomentMapData& data, const LiftedAction& action,
                             const SpaceModel& model, const std::vector<ChartPoint>& pts);

/// max |L_{X̃} Ω_N| and the Killing residual of X̃ on g_N.
Residual lift_invariance_residual(const LiftedAction& action, const SpaceModel& model,
                                  const std::vector<ChartPoint>& pts);

enum class ReducedMetric {
  radial_R4,
  sasaki_link,
  permuting_example1,
  permuting_example2,
  homothetic_general,
  permuting_general
};

std::string to_string(ReducedMetric which);
ReducedMetric reduced_metric_from_string(const std::string& name);

struct ReductionParams {
  double a = 2.0;
  /// Base with a Killing field for the general formulas (flat ℝ⁴ with U or
  /// the rotation −2x₄∂₃ + 2x₃∂₄ when absent).
  std::optional<HKData> base;
  /// Slice coordinate: t for homothetic_general, y₁ for permuting_general.
  double slice = 0.0;
};

struct QuotientModel {
  std::string name;
  std::string provenance;
  int dim = 0;
  std::vector<std::string> coords;
  MetricField metric;
  Box domain;
  std::map<std::string, double> expected;
};

QuotientModel reduced_metric(ReducedMetric which, const ReductionParams& params = {});

/// Left-invariant coframe γ₁, γ₂, γ₃ of the unit round S³ in Euler angles
/// (θ, φ, ψ), with dγ₁ = 2γ₂∧γ₃ cyclically; offset places them in a larger chart.
std::array<KFormField, 3> sphere_coframe(int offset, int dim);

// -- the permuting level set -----------------------------------------------------------

/// p = X⌟κ₁ on the base.
ScalarField permuting_potential(const HKData& base, const VectorField& x);

/// Level set {y₂ = y₃ = 0, t = −½ log(a − 2p)} on the chart (y₁, base), with the
/// pulled-back metric, the pulled-back α and the connection "xi_X" of X̃.
SpaceModel level_set_restrict(const SpaceModel& model, const LiftedAction& action);

/// X̃ on the level-set chart: X − (a/2)∂_{y₁}.
VectorField level_set_action(const LiftedAction& action);

/// Displayed closed forms on the level-set chart.
MetricField level_set_metric_formula(const HKData& base, const VectorField& x, double a);
KFormField level_set_connection_formula(const HKData& base, const VectorField& x, double a);
/// Reduced metric written through base data, on (y₁, base) or on the slice y₁ = const.
MetricField permuting_reduced_formula(const HKData& base, const VectorField& x, double a,
                                      bool with_y1);

/// g(X, ·) / g(X, X).
KFormField connection_form(const MetricField& g, const VectorField& x);
/// g − g(X, X) ξ², the part of g orthogonal to X.
MetricField horizontal_part(const MetricField& g, const VectorField& x);

// -- rotation fibration and the inverse construction -----------------------------------

/// Rotation −2x₄∂₃ + 2x₃∂₄ of flat ℝ⁴ with radial κ₁.
HKData example1_base();

/// The rotation level set in coordinates (x, x₁, x₂, p, q) with X̃ = ∂_x,
/// x₃ + i x₄ = √p e^{2ix} and q = 4y₁ − a·arctan(x₃/x₄).
struct PermutingFibration {
  double a = 2.0;
  HKData base;
  SpaceModel model;     // N over base with exponential profiles
  SmoothMap to_n;       // (x, x₁, x₂, p, q) -> N chart
  SmoothMap to_base;    // (x, x₁, x₂, p, q) -> ℝ⁴
  Box domain;           // on the fibred chart
};

PermutingFibration example1_fibration(double a = 2.0);

/// ω̄₁ = ω₁, ω̄₂ = hω₂ − fω₃, ω̄₃ = fω₂ + hω₃ (f = cos 2x, h = sin 2x) on the fibred chart.
std::array<KFormField, 3> fibred_omega_bar(const PermutingFibration& fib);

struct QuotientFrame {
  QuotientModel quotient;  // chart (x₁, x₂, p, q)
  std::array<KFormField, 3> omega_bar;
  KFormField beta, alpha2, alpha3;
  VectorField z;           // 4∂_q
  KFormField omega_bar_4;  // ½Σ ω̄ᵢ∧ω̄ᵢ
};

/// Quotient data read off on the slice x = x0 of the fibration.
QuotientFrame quotient_frame(const PermutingFibration& fib, double x0 = 0.4);

/// Max over the frame equations dω̄ = (α₂, α₃, β)·ω̄ and dβ = 4ω̄₁ + α₂∧α₃,
/// dα₂ = −4ω̄₃ + α₃∧β, dα₃ = −4ω̄₂ + β∧α₂.
Residual frame_residual(const QuotientFrame& frame, const std::vector<ChartPoint>& pts);

/// max over the identities 4Z♭ = −Ī₁d(β(Z)) = β(Z)Ī₂α₂ = −β(Z)Ī₃α₃.
Residual z_flat_residual(const QuotientFrame& frame, const std::vector<ChartPoint>& pts);

/// |(dZ♭)^{sp(1)} − β(Z) ω̄₁| with the projection onto span{ω̄ᵢ}.
Residual z_curvature_residual(const QuotientFrame& frame, const std::vector<ChartPoint>& pts);

struct HKReconstruction {
  int dim = 0;                       // 1 + quotient dim; chart (x, quotient)
  std::array<KFormField, 3> sigma;
  MetricField g;                     // degenerate along the lift of Z
  VectorField z_lift;
  KFormField xi;                     // dx + 2β(Z)⁻¹Z♭ − ½β
  double frame_residual = 0.0;
};

/// Rebuilds the hyperKähler triple and metric from quotient data.
HKReconstruction hkqk_inverse(const QuotientFrame& frame, int samples = 20,
                              std::uint64_t seed = 5, double tolerance = 1e-7);

}  // namespace qklab
