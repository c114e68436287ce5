#pragma once

// Levi-Civita geometry of a metric at chart points: Christoffel symbols,
// Riemann/Ricci/scalar curvature, Einstein and Killing residuals, Nijenhuis
// tensors, almost complex structures from (g, ω) and a pointwise holonomy
// dimension estimate.

#include <Eigen/Dense>
#include <vector>

#include "qklab/forms.hpp"

namespace qklab {

/// A (g, ω) pair that does not define an almost complex structure at a point.
class IncompatibilityError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

struct CurvatureAtPoint {
  int dim = 0;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd metric_inverse;
  /// Γ^k_{ij}, stored at k*n*n + i*n + j.
  std::vector<double> christoffel;
  /// R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} − ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ},
  /// antisymmetric in (μ, ν); stored at ((ρ*n + σ)*n + μ)*n + ν. Empty when
  /// only the connection was requested.
  std::vector<double> riemann;
  /// Ric_{σν} = R^ρ_{σρν}.
  Eigen::MatrixXd ricci;
  double scalar = 0.0;

  double gamma(int k, int i, int j) const { return christoffel[(k * dim + i) * dim + j]; }
  double riem(int r, int s, int m, int v) const { return riemann[((r * dim + s) * dim + m) * dim + v]; }

  /// max |R^ρ_{σμν} + R^ρ_{μνσ} + R^ρ_{νσμ}|.
  double bianchi_residual() const;
  /// max |R^ρ_{σμν} + R^ρ_{σνμ}|.
  double antisymmetry_residual() const;
};

/// Connection only. Requires first derivatives of g.
CurvatureAtPoint christoffel(const MetricField& g, const ChartPoint& pt);
/// Full curvature. Requires second derivatives of g.
CurvatureAtPoint curvature(const MetricField& g, const ChartPoint& pt);

/// max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|.
double metric_compatibility_residual(const MetricField& g, const ChartPoint& pt);

/// max over pts of max |Ric − λ g| componentwise.
Residual einstein_residual(const MetricField& g, double lambda, const std::vector<ChartPoint>& pts);

/// max over pts of max |L_X g| (zero iff X is Killing at the samples).
Residual killing_residual(const MetricField& g, const VectorField& x,
                          const std::vector<ChartPoint>& pts);
/// max over pts of max |L_X g − c g| (homothetic fields: c constant).
Residual homothety_residual(const MetricField& g, const VectorField& x, double c,
                            const std::vector<ChartPoint>& pts);

/// max |J² + Id| at pt.
double square_residual(const EndomorphismField& j, const ChartPoint& pt);

/// max |N^k_{ij}| with N^k_{ij} = J^m_i∂_mJ^k_j − J^m_j∂_mJ^k_i − J^k_m(∂_iJ^m_j − ∂_jJ^m_i).
/// Throws PreconditionError unless J² = −Id to 1e-8.
double nijenhuis(const EndomorphismField& j, const ChartPoint& pt);

/// Matrix Ω_ab = ω(∂_a, ∂_b) of a 2-form value.
JetMatrix two_form_matrix(const FormValue& w);

/// The endomorphism J with g(J·, ·) = ω(·, ·), i.e. J^c_a = g^{cb} ω_ab.
/// Evaluation throws IncompatibilityError unless J² = −Id to 1e-8 (relative).
EndomorphismField acs_from_pair(const MetricField& g, const KFormField& w);

/// max |g(J·, J·) − g| at pt.
double hermitian_residual(const MetricField& g, const EndomorphismField& j, const ChartPoint& pt);

/// Dimension of the bracket closure of span{R(∂_μ, ∂_ν)} at pt.
int holonomy_dim_estimate(const MetricField& g, const ChartPoint& pt, double rel_tol = 1e-8);

/// Dimension of the Lie algebra generated by the given square matrices.
int lie_closure_dim(const std::vector<Eigen::MatrixXd>& generators, double rel_tol = 1e-8);

}  // namespace qklab
