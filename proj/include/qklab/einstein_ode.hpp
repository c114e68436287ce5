#pragma once

// The cohomogeneity-one Einstein system for the profiles (p, q, r, s) of the
// bundle metrics dt² + p²g_M + q²α² + r²ξ² + s²η², with truncations for the
// smaller bundles, and a fixed-step integrator for exploring it.

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "qklab/spaces.hpp"

namespace qklab {

/// Number of active profiles: Q keeps p; P adds q; L adds r; N adds s.
int active_profiles(BundleModel which);

/// Einstein constant of the exponential family p = a e^{bt}, q = r = s = 2a²b e^{2bt}.
double exponential_einstein_constant(BundleModel which, int n, double b = 1.0);

/// Left-minus-right of each active equation at t: first the trace equation,
/// then the diagonal equations for q, r, s (as present), then the p equation.
/// Diagonal equations are divided by the square of their profile, so all
/// entries share the scale of λ.
std::vector<double> system_residual(const ProfileSet& profiles, int n, double lambda, double t,
                                    BundleModel which);

/// Max residual of the exponential family over a few t values.
double scaling_family_check(double a, double b, int n, BundleModel which);

struct OdeState {
  double t = 0.0;
  std::array<double, 4> value{};       // p, q, r, s
  std::array<double, 4> derivative{};  // p', q', r', s'
};

struct Trajectory {
  BundleModel which = BundleModel::N;
  int n = 1;
  double lambda = 0.0;
  std::vector<OdeState> states;
  /// Residual of the p equation at each state.
  std::vector<double> constraint_drift;
  bool halted = false;
  std::string halt_reason;
};

/// State of the exponential family at time t.
OdeState exponential_state(double a, double b, double t);

/// Second derivatives from the diagonal equations and the trace equation.
std::array<double, 4> second_derivatives(const OdeState& s, int n, double lambda,
                                         BundleModel which);

/// Residual of the p equation, which the integrator monitors.
double constraint_residual(const OdeState& s, int n, double lambda, BundleModel which);

/// Classical fourth-order fixed-step integration from `initial` to t_end.
Trajectory integrate(const OdeState& initial, int n, double lambda, BundleModel which,
                     double t_end, double step);

/// CSV with columns t, the active profiles, their derivatives and the drift.
void write_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace qklab
