#include "qklab/einstein_ode.hpp"

#include <cmath>
#include <iomanip>

namespace qklab {

int active_profiles(BundleModel which) {
  switch (which) {
    case BundleModel::Q: return 1;
    case BundleModel::P: return 2;
    case BundleModel::L: return 3;
    case BundleModel::N: return 4;
  }
  return 1;
}

double exponential_einstein_constant(BundleModel which, int n, double b) {
  const int k = active_profiles(which) - 1;
  return -b * b * (4.0 * n + 4.0 * k);
}

namespace {

// Value and two derivatives of each profile.
struct Profile3 {
  double f, d1, d2;
};

// Residuals from values, first and second derivatives of the active profiles.
// Each diagonal equation is divided by the square of its profile.
std::vector<double> residual_core(const std::array<Profile3, 4>& pr, int active, int n,
                                  double lambda) {
  const double p = pr[0].f, dp = pr[0].d1, ddp = pr[0].d2;
  std::vector<double> out;
  double trace = 4.0 * n * ddp / p;
  for (int k = 1; k < active; ++k) trace += pr[k].d2 / pr[k].f;
  out.push_back(trace + lambda);
  double log_sum = 0.0, sq_sum = 0.0;
  for (int k = 1; k < active; ++k) {
    log_sum += pr[k].d1 / pr[k].f;
    sq_sum += pr[k].f * pr[k].f;
  }
  for (int k = 1; k < active; ++k) {
    const double f = pr[k].f, df = pr[k].d1, ddf = pr[k].d2;
    const double others = log_sum - df / f;
    const double lhs = f * ddf + f * df * others + 4.0 * n * dp * f * df / p -
                       n * std::pow(f, 4) / std::pow(p, 4);
    out.push_back(lhs / (f * f) + lambda);
  }
  const double lhs_p = p * ddp + p * dp * log_sum + (4.0 * n - 1.0) * dp * dp + sq_sum / (2.0 * p * p);
  out.push_back(lhs_p / (p * p) + lambda);
  return out;
}

}  // namespace

std::vector<double> system_residual(const ProfileSet& profiles, int n, double lambda, double t,
                                    BundleModel which) {
  if (n < 1) throw ArgumentError("system_residual: n must be positive");
  const int active = active_profiles(which);
  const ScalarField* fields[4] = {&profiles.p, &profiles.q, &profiles.r, &profiles.s};
  std::array<Profile3, 4> pr{};
  const ChartPoint pt{t};
  for (int k = 0; k < active; ++k) {
    if (!fields[k]->valid()) throw ArgumentError("system_residual: missing profile");
    const Jet2 j = (*fields[k])(pt);
    j.require_order(2);
    if (!(j.value() > 0.0)) {
      throw EvaluationError("profile " + std::string(1, "pqrs"[k]) + " is not positive", {t});
    }
    pr[k] = {j.value(), j.grad(0), j.hess(0, 0)};
  }
  return residual_core(pr, active, n, lambda);
}

double scaling_family_check(double a, double b, int n, BundleModel which) {
  const ProfileSet s = exponential_profiles(a, b);
  const double lambda = exponential_einstein_constant(which, n, b);
  double worst = 0.0;
  for (double t : {-0.5, 0.0, 0.5}) {
    for (double r : system_residual(s, n, lambda, t, which)) worst = std::max(worst, std::abs(r));
  }
  return worst;
}

OdeState exponential_state(double a, double b, double t) {
  OdeState s;
  s.t = t;
  s.value[0] = a * std::exp(b * t);
  s.derivative[0] = b * s.value[0];
  for (int k = 1; k < 4; ++k) {
    s.value[k] = 2.0 * a * a * b * std::exp(2.0 * b * t);
    s.derivative[k] = 2.0 * b * s.value[k];
  }
  return s;
}

std::array<double, 4> second_derivatives(const OdeState& s, int n, double lambda,
                                         BundleModel which) {
  const int active = active_profiles(which);
  const double p = s.value[0], dp = s.derivative[0];
  double log_sum = 0.0;
  for (int k = 1; k < active; ++k) log_sum += s.derivative[k] / s.value[k];
  std::array<double, 4> dd{};
  double fibre_trace = 0.0;
  for (int k = 1; k < active; ++k) {
    const double f = s.value[k], df = s.derivative[k];
    const double others = log_sum - df / f;
    const double rest = f * df * others + 4.0 * n * dp * f * df / p - n * std::pow(f, 4) / std::pow(p, 4) +
                        lambda * f * f;
    dd[k] = -rest / f;
    fibre_trace += dd[k] / f;
  }
  dd[0] = -(lambda + fibre_trace) * p / (4.0 * n);
  return dd;
}

double constraint_residual(const OdeState& s, int n, double lambda, BundleModel which) {
  const int active = active_profiles(which);
  const auto dd = second_derivatives(s, n, lambda, which);
  std::array<Profile3, 4> pr{};
  for (int k = 0; k < active; ++k) pr[k] = {s.value[k], s.derivative[k], dd[k]};
  return residual_core(pr, active, n, lambda).back();
}

namespace {

using Vec = std::array<double, 8>;

Vec pack(const OdeState& s) {
  Vec v{};
  for (int k = 0; k < 4; ++k) {
    v[k] = s.value[k];
    v[4 + k] = s.derivative[k];
  }
  return v;
}

OdeState unpack(const Vec& v, double t) {
  OdeState s;
  s.t = t;
  for (int k = 0; k < 4; ++k) {
    s.value[k] = v[k];
    s.derivative[k] = v[4 + k];
  }
  return s;
}

Vec rhs(const Vec& v, double t, int n, double lambda, BundleModel which) {
  const OdeState s = unpack(v, t);
  const auto dd = second_derivatives(s, n, lambda, which);
  Vec out{};
  const int active = active_profiles(which);
  for (int k = 0; k < active; ++k) {
    out[k] = v[4 + k];
    out[4 + k] = dd[k];
  }
  return out;
}

Vec axpy(const Vec& x, double h, const Vec& d) {
  Vec r;
  for (int i = 0; i < 8; ++i) r[i] = x[i] + h * d[i];
  return r;
}

bool healthy(const Vec& v, int active, std::string& reason) {
  for (int k = 0; k < active; ++k) {
    if (!std::isfinite(v[k]) || !std::isfinite(v[4 + k])) {
      reason = "non-finite profile";
      return false;
    }
    if (v[k] <= 0.0) {
      reason = std::string("profile ") + "pqrs"[k] + " reached zero";
      return false;
    }
  }
  return true;
}

}  // namespace

Trajectory integrate(const OdeState& initial, int n, double lambda, BundleModel which,
                     double t_end, double step) {
  if (!(step > 0.0)) throw ArgumentError("integrate: step must be positive");
  if (!(t_end > initial.t)) throw ArgumentError("integrate: t_end must exceed the initial time");
  if (n < 1) throw ArgumentError("integrate: n must be positive");
  const int active = active_profiles(which);
  Trajectory tr;
  tr.which = which;
  tr.n = n;
  tr.lambda = lambda;
  Vec v = pack(initial);
  std::string reason;
  if (!healthy(v, active, reason)) throw ArgumentError("integrate: initial state invalid (" + reason + ")");
  double t = initial.t;
  tr.states.push_back(unpack(v, t));
  tr.constraint_drift.push_back(constraint_residual(tr.states.back(), n, lambda, which));
  const long steps = std::lround(std::ceil((t_end - initial.t) / step - 1e-9));
  for (long i = 0; i < steps; ++i) {
    const double h = std::min(step, t_end - t);
    const Vec k1 = rhs(v, t, n, lambda, which);
    const Vec k2 = rhs(axpy(v, h / 2, k1), t + h / 2, n, lambda, which);
    const Vec k3 = rhs(axpy(v, h / 2, k2), t + h / 2, n, lambda, which);
    const Vec k4 = rhs(axpy(v, h, k3), t + h, n, lambda, which);
    Vec next;
    for (int j = 0; j < 8; ++j) next[j] = v[j] + h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    if (!healthy(next, active, reason)) {
      tr.halted = true;
      tr.halt_reason = reason + " near t = " + std::to_string(t + h);
      break;
    }
    v = next;
    t += h;
    tr.states.push_back(unpack(v, t));
    tr.constraint_drift.push_back(constraint_residual(tr.states.back(), n, lambda, which));
  }
  return tr;
}

void write_csv(const Trajectory& tr, std::ostream& out) {
  const int active = active_profiles(tr.which);
  const char* names = "pqrs";
  out << "t";
  for (int k = 0; k < active; ++k) out << ',' << names[k];
  for (int k = 0; k < active; ++k) out << ',' << names[k] << "_prime";
  out << ",constraint_drift\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& s = tr.states[i];
    out << s.t;
    for (int k = 0; k < active; ++k) out << ',' << s.value[k];
    for (int k = 0; k < active; ++k) out << ',' << s.derivative[k];
    out << ',' << tr.constraint_drift[i] << '\n';
  }
}

}  // namespace qklab
