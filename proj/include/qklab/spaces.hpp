#pragma once

// Constructors for the geometries under test: hyperKähler bases, the torus
// bundle Einstein metrics on (t, y_1, y_2, y_3) × M, hypercomplex total
// spaces, balanced structures and Ricci-flat specials.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qklab/curvature.hpp"

namespace qklab {

enum class KillingKind { triholomorphic, permuting, homothetic, vertical };

std::string to_string(KillingKind kind);

struct HKData {
  std::string name;
  int dim = 0;  // 4n
  std::vector<std::string> coords;
  MetricField g;
  std::array<KFormField, 3> sigma;
  /// dκ_i = σ_i; the bundle forms are α = dy_1 + κ_1, ξ = dy_2 − κ_2, η = dy_3 − κ_3
  /// so that dα = σ_1, dξ = −σ_2, dη = −σ_3.
  std::optional<std::array<KFormField, 3>> kappa;
  std::optional<VectorField> killing;
  std::optional<KillingKind> killing_kind;
  /// Default sampling region.
  Box domain;

  int quaternionic_dim() const { return dim / 4; }
};

enum class FlatPotentials {
  standard,  // κ_1 = x1 dx2 + x3 dx4, κ_2 = x1 dx3 + x4 dx2, κ_3 = x1 dx4 + x2 dx3
  radial,    // κ_i = ½ ι_E σ_i with E the Euler field
};

/// ℝ^{4n} (or a 𝕋^{4n} chart) with the block-repeated standard triple.
HKData flat_base(int n, bool torus = false, FlatPotentials potentials = FlatPotentials::standard);

/// Radial U = −E, the diagonal rotation V = −x2∂1 + x1∂2 − x4∂3 + x3∂4 and
/// W = −x2∂1 + x1∂2 + x4∂3 − x3∂4 on ℝ⁴.
VectorField flat_homothetic_field(int dim);
VectorField flat_permuting_field();
VectorField flat_triholomorphic_field();

struct GibbonsHawkingOptions {
  /// Box in (u1, u2, u3) used for the harmonicity and connection checks.
  Box check_box = Box{{0.5, -1.0, -1.0}, {1.5, 1.0, 1.0}};
  int check_samples = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
};

/// HK structure from a harmonic V on (u1, u2, u3) and θ on the chart
/// (y, u1, u2, u3): σ_1 = θ∧du1 + V du23 (cyclic), g = V⁻¹θ² + V δ.
/// Verifies ΔV = 0 and dθ = −∗dV at sampled points (ConstructionError otherwise).
HKData gibbons_hawking(const ScalarField& v, const KFormField& theta,
                       std::optional<std::array<KFormField, 3>> kappa = std::nullopt,
                       const GibbonsHawkingOptions& options = {});

/// The GH base with V = u1, θ = dy + u3 du2 and explicit potentials.
HKData gibbons_hawking_linear();

struct ProfileSet {
  ScalarField p, q, r, s;  // functions of t on a 1-dim chart; unused ones left invalid
  std::optional<double> rate;  // b for the exponential family
};

ProfileSet exponential_profiles(double a = 1.0, double b = 1.0);

enum class BundleModel { Q, P, L, N };

std::string to_string(BundleModel which);

struct SpaceModel {
  std::string name;
  std::string kind;
  int dim = 0;
  int n = 0;  // quaternionic dimension of the base
  /// Index of the first base coordinate; the t coordinate (if any) is slot 0.
  int base_offset = 0;
  std::vector<std::string> coords;
  MetricField metric;
  std::map<std::string, KFormField> forms;
  std::map<std::string, ComplexFormField> complex_forms;
  std::map<std::string, double> expected;
  std::optional<ProfileSet> profiles;
  Box domain;

  const KFormField& form(const std::string& key) const;
  const ComplexFormField& complex_form(const std::string& key) const;
  double expect(const std::string& key) const;
};

/// Bundle metric g = dt² + p²g_M + q²α² + r²ξ² + s²η² restricted to the model.
/// Emits α, ξ, η, dt, σ_i (lifted) and, for N, ω_1, ω_2, ω_3 and Ω_N; for P, ω_P.
/// Expected constants: "lambda" for the exponential profiles, "holonomy_dim".
SpaceModel build_bundle(const HKData& base, BundleModel which,
                        const ProfileSet& profiles = exponential_profiles());

enum class HypercomplexShape {
  connection,  // (α, ξ, η, ν) with dν = γ
  abelian,     // (ν_1, …, ν_4) with dν_i = γ_i
};

/// Fibre potentials: connection shape takes one (for ν), abelian shape 1..4
/// (missing ones are zero). Each fibre form is dy_k + potential.
/// With validate, every curvature dν must lie in sp(n) (ConstructionError).
SpaceModel build_hypercomplex(const HKData& base, HypercomplexShape shape,
                              const std::vector<KFormField>& potentials, bool validate = true);

/// ν_1 = x1dx2 − x3dx4, ν_2 = x1dx3 − x4dx2, ν_3 = x1dx4 − x2dx3 (anti-self-dual curvatures).
std::array<KFormField, 3> flat_asd_potentials();

/// (ξ, η) bundle with ω = ξ∧η + σ_1 and Υ = (ξ + iη)∧(σ_2 + iσ_3)^n.
SpaceModel build_balanced_xi_eta(const HKData& base);

enum class RicciFlatSpecial { calabi_P, as_G2_L7, spin7_N8 };

SpaceModel ricci_flat_special(const HKData& base, RicciFlatSpecial which, double b = 1.0,
                              double c = 2.0);

/// max |d(ω^power)| over pts.
Residual balanced_check(const SpaceModel& model, const std::string& which_form, int power,
                        const std::vector<ChartPoint>& pts);

/// The dω_i block on an N model.
Residual structure_equation_residual(const SpaceModel& model, const std::vector<ChartPoint>& pts);

/// Max coefficient of a form over pts.
Residual form_residual(const KFormField& f, const std::vector<ChartPoint>& pts);
Residual form_residual(const ComplexFormField& f, const std::vector<ChartPoint>& pts);

/// dσ_i = 0, σ_i∧σ_j = δ_ij σ_1² (4-dim), I_i from (g, σ_i) Hermitian and
/// I_1 I_2 = I_3 (cyclic).
Residual hk_invariants_residual(const HKData& base, const std::vector<ChartPoint>& pts);

/// dκ_i − σ_i.
Residual potential_residual(const HKData& base, const std::vector<ChartPoint>& pts);

/// On an N model: I_i = acs_from_pair(g, ω_i) satisfy the quaternion
/// relations and g(I_i·, I_i·) = g.
Residual quaternionic_residual(const SpaceModel& model, const std::vector<ChartPoint>& pts);

/// g restricted to horizontal lifts of base coordinate fields equals p(t)² g_M.
Residual submersion_residual(const SpaceModel& model, const HKData& base,
                             const std::vector<ChartPoint>& pts);

/// Helper for polynomial one-forms: Σ c x_i dx_j.
struct LinearTerm {
  double c;
  int coord;
  int differential;
};
KFormField linear_one_form(int dim, const std::vector<LinearTerm>& terms);

}  // namespace qklab
