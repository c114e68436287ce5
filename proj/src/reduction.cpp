#include "qklab/reduction.hpp"

#include <cmath>
#include <numbers>

namespace qklab {

namespace {

constexpr int kFibre = 4;  // t, y1, y2, y3

VectorField constant_field(int dim, int index, double c) {
  return c * VectorField::coordinate(index, dim);
}

VectorField zero_field(int dim) { return VectorField::linear(Eigen::MatrixXd::Zero(dim, dim)); }

ScalarField lift_scalar(const ScalarField& f, int offset, int dim) {
  const int m = f.dim();
  return ScalarField(dim, [f, offset, m, dim](const ChartPoint& pt) {
    std::vector<double> sub(pt.coords().begin() + offset, pt.coords().begin() + offset + m);
    return embed(f(ChartPoint(sub)), offset, dim);
  });
}

MetricField embed_metric(const MetricField& g, int offset, int dim) { return embed(g, offset, dim); }

ScalarField profile_squared(const SpaceModel& model) {
  if (!model.profiles) throw ArgumentError("model has no profiles");
  const ScalarField p = model.profiles->p;
  const int dim = model.dim;
  return ScalarField(dim, [p, dim](const ChartPoint& pt) {
    const Jet2 v = embed(p(ChartPoint{pt[0]}), 0, dim);
    return v * v;
  });
}

double max_form(const KFormField& f, const std::vector<ChartPoint>& pts) {
  double m = 0.0;
  for (const auto& pt : pts) m = std::max(m, f(pt).max_abs());
  return m;
}

void require_n_model(const SpaceModel& model, const HKData& base) {
  if (model.kind != "N") throw ArgumentError("moment maps are defined on N models");
  if (model.dim != kFibre + base.dim) throw ArgumentError("model chart does not match the lift");
}

}  // namespace

HKData adapt_potentials(const HKData& base, KillingKind kind) {
  if (!base.killing) throw ArgumentError("adapt_potentials: base has no Killing field");
  HKData out = base;
  const VectorField& x = *base.killing;
  std::array<KFormField, 3> kappa;
  if (kind == KillingKind::permuting) {
    if (!base.kappa) throw ArgumentError("adapt_potentials: permuting kind keeps κ₁, which is missing");
    kappa[0] = (*base.kappa)[0];
    kappa[1] = 0.5 * interior_product(x, base.sigma[2]);
    kappa[2] = -0.5 * interior_product(x, base.sigma[1]);
  } else if (kind == KillingKind::homothetic) {
    for (int i = 0; i < 3; ++i) kappa[i] = -0.5 * interior_product(x, base.sigma[i]);
  } else {
    return out;
  }
  out.kappa = kappa;
  return out;
}

LiftedAction build_lift(const HKData& base, KillingKind kind, LiftConstants constants,
                        double tolerance) {
  const int dim = kFibre + base.dim;
  if (dim > kMaxDim) throw ArgumentError("build_lift: N chart exceeds the maximum dimension");
  LiftedAction act;
  act.kind = kind;
  act.constants = constants;
  act.base = base;
  if (kind == KillingKind::vertical) {
    act.base_field = zero_field(base.dim);
    act.lift = constant_field(dim, 1, -constants.a) + constant_field(dim, 2, constants.b) +
               constant_field(dim, 3, constants.c);
    return act;
  }
  if (!base.killing) throw ConstructionError("build_lift: base carries no Killing field");
  const VectorField& x = *base.killing;
  // kind check on the base
  const auto pts = sample_points(base.domain, 10, 3);
  std::array<KFormField, 3> target;
  double metric_c = 0.0;
  switch (kind) {
    case KillingKind::triholomorphic:
      for (int i = 0; i < 3; ++i) target[i] = KFormField::zero(base.dim, 2);
      break;
    case KillingKind::permuting:
      target = {KFormField::zero(base.dim, 2), -2.0 * base.sigma[2], 2.0 * base.sigma[1]};
      break;
    case KillingKind::homothetic:
      for (int i = 0; i < 3; ++i) target[i] = -2.0 * base.sigma[i];
      metric_c = -2.0;
      break;
    case KillingKind::vertical: break;
  }
  for (int i = 0; i < 3; ++i) {
    const double r = max_form(lie_derivative(x, base.sigma[i]) - target[i], pts);
    if (r > tolerance) {
      throw ConstructionError("build_lift: field is not " + to_string(kind) + " (L_X sigma" +
                              std::to_string(i + 1) + " off by " + std::to_string(r) + ")");
    }
  }
  const Residual hr = homothety_residual(base.g, x, metric_c, pts);
  if (hr.value > tolerance) {
    throw ConstructionError("build_lift: field does not scale the metric as a " + to_string(kind) +
                            " field should (residual " + std::to_string(hr.value) + ")");
  }
  act.base = adapt_potentials(base, kind);
  act.base_field = x;
  VectorField lift = embed(x, kFibre, dim);
  if (kind == KillingKind::permuting) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    m(2, 3) = -2.0;
    m(3, 2) = 2.0;
    lift = lift + VectorField::linear(m) + constant_field(dim, 1, -constants.a / 2.0);
    act.permuting_weight = 1.0;
  } else if (kind == KillingKind::homothetic) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 1; k <= 3; ++k) m(k, k) = -2.0;
    lift = lift + VectorField::linear(m) + constant_field(dim, 0, 1.0);
  }
  act.lift = lift;
  return act;
}

LiftedAction combine_lifts(const std::vector<std::pair<double, LiftedAction>>& terms) {
  if (terms.empty()) throw ArgumentError("combine_lifts: no terms");
  LiftedAction out;
  out.combined = true;
  out.kind = terms.front().second.kind;
  out.base = terms.front().second.base;
  bool first = true;
  for (const auto& [w, act] : terms) {
    if (act.lift.dim() != terms.front().second.lift.dim()) {
      throw ArgumentError("combine_lifts: lifts live on different charts");
    }
    if (first) {
      out.lift = w * act.lift;
      out.base_field = w * act.base_field;
      first = false;
    } else {
      out.lift = out.lift + w * act.lift;
      out.base_field = out.base_field + w * act.base_field;
    }
    out.permuting_weight += w * act.permuting_weight;
    out.constants.a += w * act.constants.a;
    out.constants.b += w * act.constants.b;
    out.constants.c += w * act.constants.c;
  }
  return out;
}

MomentMapData moment_map(const LiftedAction& action, const SpaceModel& model, int samples,
                         std::uint64_t seed, double tolerance) {
  require_n_model(model, action.base);
  MomentMapData m;
  m.mu_alpha = -as_function(interior_product(action.lift, model.form("alpha")));
  m.mu_xi = as_function(interior_product(action.lift, model.form("xi")));
  m.mu_eta = as_function(interior_product(action.lift, model.form("eta")));
  const ScalarField p2 = profile_squared(model);
  m.components[0] = p2 * m.mu_alpha + (-0.5 * action.permuting_weight);
  m.components[1] = p2 * m.mu_xi;
  m.components[2] = p2 * m.mu_eta;
  m.f = m.components[0] * model.form("omega1") + m.components[1] * model.form("omega2") +
        m.components[2] * model.form("omega3");
  m.residual = moment_map_residual(m, action, model, sample_points(model.domain, samples, seed));
  if (m.residual.value > tolerance) {
    throw VerificationError("moment map identity df = X⌟Ω fails", m.residual.value,
                            m.residual.worst_point);
  }
  return m;
}

Residual moment_map_residual(const MomentMapData& data, const LiftedAction& action,
                             const SpaceModel& model, const std::vector<ChartPoint>& pts) {
  const KFormField r = exterior_derivative(data.f) - interior_product(action.lift, model.form("Omega"));
  return max_residual(pts, [&](const ChartPoint& pt) { return r(pt).max_abs(); });
}

Residual lift_invariance_residual(const LiftedAction& action, const SpaceModel& model,
                                  const std::vector<ChartPoint>& pts) {
  const KFormField l = lie_derivative(action.lift, model.form("Omega"));
  Residual r = max_residual(pts, [&](const ChartPoint& pt) { return l(pt).max_abs(); });
  r.absorb(killing_residual(model.metric, action.lift, pts));
  return r;
}

// -- closed-form quotients ------------------------------------------------------------------

std::string to_string(ReducedMetric which) {
  switch (which) {
    case ReducedMetric::radial_R4: return "radial_R4";
    case ReducedMetric::sasaki_link: return "sasaki_link";
    case ReducedMetric::permuting_example1: return "permuting_example1";
    case ReducedMetric::permuting_example2: return "permuting_example2";
    case ReducedMetric::homothetic_general: return "homothetic_general";
    case ReducedMetric::permuting_general: return "permuting_general";
  }
  return "?";
}

ReducedMetric reduced_metric_from_string(const std::string& name) {
  for (auto w : {ReducedMetric::radial_R4, ReducedMetric::sasaki_link,
                 ReducedMetric::permuting_example1, ReducedMetric::permuting_example2,
                 ReducedMetric::homothetic_general, ReducedMetric::permuting_general}) {
    if (to_string(w) == name) return w;
  }
  throw ArgumentError("unknown reduced metric '" + name + "'");
}

std::array<KFormField, 3> sphere_coframe(int offset, int dim) {
  if (offset < 0 || offset + 3 > dim) throw ArgumentError("sphere_coframe: bad offset");
  const ScalarField th = lift_coordinate(offset, dim);
  const ScalarField ps = lift_coordinate(offset + 2, dim);
  const ScalarField none;
  const auto place = [&](ScalarField a, ScalarField b, ScalarField c) {
    std::vector<ScalarField> comps(dim);
    comps[offset] = a;
    comps[offset + 1] = b;
    comps[offset + 2] = c;
    return KFormField::one_form(comps);
  };
  const ScalarField sth = map(th, qklab::sin), cth = map(th, qklab::cos);
  const ScalarField sps = map(ps, qklab::sin), cps = map(ps, qklab::cos);
  return {place(-0.5 * sps, 0.5 * (cps * sth), none),
          place(0.5 * cps, 0.5 * (sps * sth), none),
          place(none, 0.5 * cth, ScalarField::constant(dim, 0.5))};
}

namespace {

QuotientModel hyperbolic_cone(bool via_coframe) {
  QuotientModel q;
  q.dim = 4;
  q.coords = {"y", "theta", "phi", "psi"};
  q.domain = Box{{0.3, 0.4, -1.0, -1.0}, {1.2, 2.7, 1.0, 1.0}};
  const ScalarField y = lift_coordinate(0, 4);
  const ScalarField warp = map(y, qklab::sinh) * map(y, qklab::cosh);
  const KFormField dy = KFormField::basis(4, {0});
  MetricField sphere;
  if (via_coframe) {
    const auto g = sphere_coframe(1, 4);
    sphere = square(g[0]) + square(g[1]) + square(g[2]);
    q.name = "sasaki_link";
    q.provenance = "dy² + sinh²y cosh²y (γ₁²+γ₂²+γ₃²) over the round S³ coframe";
  } else {
    const ScalarField th = lift_coordinate(1, 4);
    const KFormField dth = KFormField::basis(4, {1});
    const KFormField sdphi = map(th, qklab::sin) * KFormField::basis(4, {2});
    const KFormField hopf = KFormField::basis(4, {3}) + map(th, qklab::cos) * KFormField::basis(4, {2});
    sphere = 0.25 * (square(dth) + square(sdphi) + square(hopf));
    q.name = "radial_R4";
    q.provenance = "dy² + sinh²y cosh²y g_S³ in Euler angles";
  }
  q.metric = square(dy) + (warp * warp) * sphere;
  q.expected["scalar"] = -48.0;
  q.expected["lambda"] = -12.0;
  return q;
}

QuotientModel example1_metric(double a) {
  if (!(a >= 0.0)) throw ArgumentError("permuting_example1: a must be nonnegative");
  QuotientModel q;
  q.name = "permuting_example1";
  q.provenance = "rotation quotient closed form in (x1, x2, p, q)";
  q.dim = 4;
  q.coords = {"x1", "x2", "p", "q"};
  const double p_hi = a > 0.2 ? 0.45 * a / 2.0 : 1.0;
  const double p_lo = a > 0.2 ? 0.05 * a / 2.0 : 0.1;
  q.domain = Box{{-0.5, -0.5, p_lo, -1.0}, {0.5, 0.5, p_hi, 1.0}};
  const ScalarField x1 = lift_coordinate(0, 4), x2 = lift_coordinate(1, 4), p = lift_coordinate(2, 4);
  const ScalarField one = ScalarField::constant(4, 1.0);
  const ScalarField plus = 2.0 * p + a, minus = 2.0 * p + (-a);
  const ScalarField m2 = minus * minus;
  const KFormField dx1 = KFormField::basis(4, {0}), dx2 = KFormField::basis(4, {1});
  const KFormField dp = KFormField::basis(4, {2});
  const KFormField twist = KFormField::basis(4, {3}) - 2.0 * (x2 * dx1 - x1 * dx2);
  q.metric = (plus / m2) * (square(dx1) + square(dx2)) + (plus / (4.0 * p * m2)) * square(dp) +
             (p / (m2 * plus)) * square(twist);
  q.expected["scalar"] = -48.0;
  q.expected["lambda"] = -12.0;
  q.expected["a"] = a;
  return q;
}

QuotientModel example2_metric(double a) {
  if (!(a > 0.0)) throw ArgumentError("permuting_example2: a must be positive");
  QuotientModel q;
  q.name = "permuting_example2";
  q.provenance = "a/(a − r²)² δ on ℝ⁴";
  q.dim = 4;
  q.coords = {"x1", "x2", "x3", "x4"};
  const double h = 0.35 * std::sqrt(a);
  q.domain = uniform_box(4, -h, h);
  ScalarField r2 = ScalarField::constant(4, 0.0);
  for (int i = 0; i < 4; ++i) r2 = r2 + lift_coordinate(i, 4) * lift_coordinate(i, 4);
  const ScalarField c = -1.0 * r2 + a;
  q.metric = (a * (ScalarField::constant(4, 1.0) / (c * c))) * MetricField::euclidean(4);
  q.expected["scalar"] = -48.0;
  q.expected["lambda"] = -12.0;
  q.expected["a"] = a;
  return q;
}

HKData default_homothetic_base() {
  HKData b = flat_base(1, false, FlatPotentials::radial);
  b.killing = flat_homothetic_field(4);
  b.killing_kind = KillingKind::homothetic;
  return b;
}

QuotientModel homothetic_metric(const ReductionParams& params) {
  HKData base = params.base ? *params.base : default_homothetic_base();
  if (!base.killing) throw ArgumentError("homothetic_general: base has no Killing field");
  base = adapt_potentials(base, KillingKind::homothetic);
  const int dim = base.dim;
  const double t0 = params.slice;
  const VectorField& x = *base.killing;
  const KFormField xflat = flat(base.g, x);
  const ScalarField norm = inner(base.g, x, x);
  const double e2 = std::exp(2.0 * t0);
  MetricField k = square((*base.kappa)[0]) + square((*base.kappa)[1]) + square((*base.kappa)[2]);
  const ScalarField denom = e2 * norm + 1.0;
  QuotientModel q;
  q.name = "homothetic_general";
  q.provenance = "general homothetic quotient on the slice t = " + std::to_string(t0);
  q.dim = dim;
  q.coords = base.coords;
  q.domain = base.domain;
  q.metric = (4.0 * e2 * e2) * k + e2 * base.g -
             (e2 * e2) * ((ScalarField::constant(dim, 1.0) / denom) * square(xflat));
  const int n = base.quaternionic_dim();
  q.expected["lambda"] = -4.0 * (n + 2);
  q.expected["scalar"] = -16.0 * n * (n + 2);
  return q;
}

}  // namespace

HKData example1_base() {
  HKData b = flat_base(1, false, FlatPotentials::radial);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(2, 3) = -2.0;
  m(3, 2) = 2.0;
  b.killing = VectorField::linear(m);
  b.killing_kind = KillingKind::permuting;
  b.name = "R4 with rotation of (x3, x4)";
  return adapt_potentials(b, KillingKind::permuting);
}

ScalarField permuting_potential(const HKData& base, const VectorField& x) {
  if (!base.kappa) throw ArgumentError("permuting_potential: base has no κ₁");
  return as_function(interior_product(x, (*base.kappa)[0]));
}

namespace {

// Shared pieces of the permuting formulas on (y₁, base) or on the base alone.
struct PermutingPieces {
  int dim, off;
  ScalarField c, norm;           // a − 2p and g_M(X, X)
  KFormField dp, a1, k2, k3, xflat;
  MetricField gm;
};

PermutingPieces permuting_pieces(const HKData& base, const VectorField& x, double a, bool with_y1) {
  if (!base.kappa) throw ArgumentError("permuting formulas need κ potentials");
  PermutingPieces s;
  s.off = with_y1 ? 1 : 0;
  s.dim = s.off + base.dim;
  const ScalarField p = permuting_potential(base, x);
  const ScalarField cval = -2.0 * p + a;
  // a − 2p > 0 is required for the level set
  const ScalarField checked(base.dim, [cval](const ChartPoint& pt) {
    const Jet2 v = cval(pt);
    if (!(v.value() > 0.0)) throw DomainError("a − 2p is not positive");
    return v;
  });
  s.c = lift_scalar(checked, s.off, s.dim);
  s.norm = lift_scalar(inner(base.g, x, x), s.off, s.dim);
  // dp = −X⌟σ₁ when κ₁ is X-invariant; keeps the full jet order
  const auto pts = sample_points(base.domain, 8, 17);
  const KFormField drift = lie_derivative(x, (*base.kappa)[0]);
  const double r = max_residual(pts, [&](const ChartPoint& pt) { return drift(pt).max_abs(); }).value;
  if (r > 1e-8) throw ConstructionError("permuting formulas need an X-invariant κ₁ (|L_X κ₁| = " +
                                        std::to_string(r) + ")");
  s.dp = embed(-1.0 * interior_product(x, base.sigma[0]), s.off, s.dim);
  s.a1 = embed((*base.kappa)[0], s.off, s.dim);
  if (with_y1) s.a1 = KFormField::basis(s.dim, {0}) + s.a1;
  s.k2 = embed((*base.kappa)[1], s.off, s.dim);
  s.k3 = embed((*base.kappa)[2], s.off, s.dim);
  s.xflat = embed(flat(base.g, x), s.off, s.dim);
  s.gm = embed_metric(base.g, s.off, s.dim);
  return s;
}

}  // namespace

MetricField level_set_metric_formula(const HKData& base, const VectorField& x, double a) {
  const PermutingPieces s = permuting_pieces(base, x, a, true);
  const ScalarField one = ScalarField::constant(s.dim, 1.0);
  const ScalarField ic = one / s.c;
  return (ic * ic) * square(s.dp) + (4.0 * (ic * ic)) * (square(s.a1) + square(s.k2) + square(s.k3)) +
         ic * s.gm;
}

KFormField level_set_connection_formula(const HKData& base, const VectorField& x, double a) {
  const PermutingPieces s = permuting_pieces(base, x, a, true);
  const ScalarField one = ScalarField::constant(s.dim, 1.0);
  return (one / (s.c + s.norm)) * (s.xflat - 2.0 * s.a1);
}

MetricField permuting_reduced_formula(const HKData& base, const VectorField& x, double a,
                                      bool with_y1) {
  const PermutingPieces s = permuting_pieces(base, x, a, with_y1);
  const ScalarField one = ScalarField::constant(s.dim, 1.0);
  const ScalarField ic = one / s.c;
  const ScalarField d = s.c + s.norm;
  // X♭ ⊙ A here stands for X♭⊗A + A⊗X♭
  return (ic * ic) * square(s.dp) + ((4.0 * s.norm) * (ic * ic) / d) * square(s.a1) +
         (4.0 * (ic * ic)) * (square(s.k2) + square(s.k3)) + ic * s.gm +
         (ic / d) * (4.0 * symmetric_product(s.xflat, s.a1) - square(s.xflat));
}

QuotientModel reduced_metric(ReducedMetric which, const ReductionParams& params) {
  switch (which) {
    case ReducedMetric::radial_R4: return hyperbolic_cone(false);
    case ReducedMetric::sasaki_link: return hyperbolic_cone(true);
    case ReducedMetric::permuting_example1: return example1_metric(params.a);
    case ReducedMetric::permuting_example2: return example2_metric(params.a);
    case ReducedMetric::homothetic_general: return homothetic_metric(params);
    case ReducedMetric::permuting_general: {
      const HKData base = params.base ? adapt_potentials(*params.base, KillingKind::permuting)
                                      : example1_base();
      if (!base.killing) throw ArgumentError("permuting_general: base has no Killing field");
      QuotientModel q;
      q.name = "permuting_general";
      q.provenance = "general permuting quotient on the slice y1 = " + std::to_string(params.slice);
      q.dim = base.dim;
      q.coords = base.coords;
      q.domain = uniform_box(base.dim, -0.5, 0.5);
      // the formula only involves dy₁ + κ₁, so the slice value does not enter
      q.metric = permuting_reduced_formula(base, *base.killing, params.a, false);
      const int n = base.quaternionic_dim();
      q.expected["lambda"] = -4.0 * (n + 2);
      q.expected["scalar"] = -16.0 * n * (n + 2);
      q.expected["a"] = params.a;
      return q;
    }
  }
  throw ArgumentError("reduced_metric: unknown formula");
}

KFormField connection_form(const MetricField& g, const VectorField& x) {
  return (ScalarField::constant(g.dim(), 1.0) / inner(g, x, x)) * flat(g, x);
}

MetricField horizontal_part(const MetricField& g, const VectorField& x) {
  return g - (ScalarField::constant(g.dim(), 1.0) / inner(g, x, x)) * square(flat(g, x));
}

VectorField level_set_action(const LiftedAction& action) {
  if (action.kind != KillingKind::permuting || action.combined) {
    throw ArgumentError("level set geometry needs a single permuting action");
  }
  const int dim = 1 + action.base.dim;
  return embed(action.base_field, 1, dim) + constant_field(dim, 0, -action.constants.a / 2.0);
}

SpaceModel level_set_restrict(const SpaceModel& model, const LiftedAction& action) {
  require_n_model(model, action.base);
  const VectorField xa = level_set_action(action);
  const HKData& base = action.base;
  const int bdim = base.dim, dim = 1 + bdim, ndim = model.dim;
  const double a = action.constants.a;
  const ScalarField p = permuting_potential(base, action.base_field);
  const SmoothMap phi(dim, ndim, [p, a, bdim, dim, ndim](const ChartPoint& pt) {
    std::vector<double> sub(pt.coords().begin() + 1, pt.coords().end());
    const Jet2 pv = embed(p(ChartPoint(sub)), 1, dim);
    const Jet2 c = a - 2.0 * pv;
    if (!(c.value() > 0.0)) throw DomainError("a − 2p is not positive on the level set");
    std::vector<Jet2> out(ndim, Jet2::constant(dim, 0.0));
    out[0] = -0.5 * log(c);
    out[1] = Jet2::variable(dim, 0, pt[0]);
    for (int i = 0; i < bdim; ++i) out[kFibre + i] = Jet2::variable(dim, 1 + i, pt[1 + i]);
    return out;
  });
  SpaceModel m;
  m.kind = "level_set";
  m.name = "level set of the permuting moment map in " + model.name;
  m.dim = dim;
  m.n = model.n;
  m.base_offset = 1;
  m.coords = {"y1"};
  m.coords.insert(m.coords.end(), base.coords.begin(), base.coords.end());
  m.domain = Box{{-1.0}, {1.0}};
  m.domain.lo.insert(m.domain.lo.end(), base.domain.lo.begin(), base.domain.lo.end());
  m.domain.hi.insert(m.domain.hi.end(), base.domain.hi.begin(), base.domain.hi.end());
  m.metric = pullback(phi, model.metric);
  m.forms["alpha"] = pullback(phi, model.form("alpha"));
  m.forms["omega1"] = pullback(phi, model.form("omega1"));
  m.forms["xi_X"] = connection_form(m.metric, xa);
  m.expected["a"] = a;
  return m;
}

// -- rotation fibration ------------------------------------------------------------------

namespace {

// (x, x₁, x₂, p, q) ↦ N chart; with a fixed x0 the x slot is dropped.
SmoothMap example1_map(double a, std::optional<double> x0) {
  const int src = x0 ? 4 : 5;
  const int tgt = 8;
  struct Vars {
    Jet2 x, x1, x2, p, q;
  };
  const auto vars = [src, x0, a](const ChartPoint& pt) {
    Vars v;
    const int o = x0 ? -1 : 0;
    v.x = x0 ? Jet2::constant(src, *x0) : Jet2::variable(src, 0, pt[0]);
    v.x1 = Jet2::variable(src, 1 + o, pt[1 + o]);
    v.x2 = Jet2::variable(src, 2 + o, pt[2 + o]);
    v.p = Jet2::variable(src, 3 + o, pt[3 + o]);
    v.q = Jet2::variable(src, 4 + o, pt[4 + o]);
    if (!(v.p.value() > 0.0)) throw DomainError("p must be positive");
    if (!(a - 2.0 * v.p.value() > 0.0)) throw DomainError("a − 2p is not positive");
    return v;
  };
  auto comps = [vars, a, src](const ChartPoint& pt) {
    const Vars v = vars(pt);
    const Jet2 rp = sqrt(v.p);
    std::vector<Jet2> out(tgt, Jet2::constant(src, 0.0));
    out[0] = -0.5 * log(a - 2.0 * v.p);
    out[1] = 0.25 * (v.q + a * (std::numbers::pi / 2.0 - 2.0 * v.x));
    out[4] = v.x1;
    out[5] = v.x2;
    out[6] = rp * cos(2.0 * v.x);
    out[7] = rp * sin(2.0 * v.x);
    return out;
  };
  auto jac = [vars, a, src, x0](const ChartPoint& pt) {
    const Vars v = vars(pt);
    const Jet2 rp = sqrt(v.p);
    const Jet2 c2 = cos(2.0 * v.x), s2 = sin(2.0 * v.x);
    JetMatrix j(tgt, src);
    for (int r = 0; r < tgt; ++r)
      for (int c = 0; c < src; ++c) j(r, c) = Jet2::constant(src, 0.0);
    const int o = x0 ? -1 : 0;
    j(0, 3 + o) = 1.0 / (a - 2.0 * v.p);
    j(1, 4 + o) = Jet2::constant(src, 0.25);
    j(4, 1 + o) = Jet2::constant(src, 1.0);
    j(5, 2 + o) = Jet2::constant(src, 1.0);
    j(6, 3 + o) = c2 / (2.0 * rp);
    j(7, 3 + o) = s2 / (2.0 * rp);
    if (!x0) {
      j(1, 0) = Jet2::constant(src, -a / 2.0);
      j(6, 0) = -2.0 * rp * s2;
      j(7, 0) = 2.0 * rp * c2;
    }
    return j;
  };
  return SmoothMap(src, tgt, comps, jac);
}

}  // namespace

PermutingFibration example1_fibration(double a) {
  if (!(a > 0.2)) throw ArgumentError("example1_fibration: a must exceed 0.2");
  PermutingFibration f;
  f.a = a;
  f.base = example1_base();
  f.model = build_bundle(f.base, BundleModel::N, exponential_profiles());
  f.to_n = example1_map(a, std::nullopt);
  f.to_base = SmoothMap(5, 4, [](const ChartPoint& pt) {
    const Jet2 x = Jet2::variable(5, 0, pt[0]);
    const Jet2 rp = sqrt(Jet2::variable(5, 3, pt[3]));
    return std::vector<Jet2>{Jet2::variable(5, 1, pt[1]), Jet2::variable(5, 2, pt[2]),
                             rp * cos(2.0 * x), rp * sin(2.0 * x)};
  });
  const double p_hi = 0.45 * a / 2.0;
  f.domain = Box{{0.2, -0.5, -0.5, 0.05 * a / 2.0, -1.0}, {0.6, 0.5, 0.5, p_hi, 1.0}};
  return f;
}

std::array<KFormField, 3> fibred_omega_bar(const PermutingFibration& fib) {
  const ScalarField x2 = 2.0 * lift_coordinate(0, 5);
  const ScalarField f = map(x2, qklab::cos), h = map(x2, qklab::sin);
  const KFormField w1 = pullback(fib.to_n, fib.model.form("omega1"));
  const KFormField w2 = pullback(fib.to_n, fib.model.form("omega2"));
  const KFormField w3 = pullback(fib.to_n, fib.model.form("omega3"));
  return {w1, h * w2 - f * w3, f * w2 + h * w3};
}

QuotientFrame quotient_frame(const PermutingFibration& fib, double x0) {
  const SmoothMap psi = example1_map(fib.a, x0);
  const SpaceModel& m = fib.model;
  const int nd = m.dim;
  const double f = std::cos(2.0 * x0), h = std::sin(2.0 * x0);
  const ScalarField e2t = map(2.0 * lift_coordinate(0, nd), qklab::exp);
  QuotientFrame q;
  q.quotient = reduced_metric(ReducedMetric::permuting_example1, ReductionParams{fib.a, {}, 0.0});
  const KFormField w1 = pullback(psi, m.form("omega1"));
  const KFormField w2 = pullback(psi, m.form("omega2"));
  const KFormField w3 = pullback(psi, m.form("omega3"));
  q.omega_bar = {w1, h * w2 - f * w3, f * w2 + h * w3};
  q.omega_bar_4 = 0.5 * (wedge(q.omega_bar[0], q.omega_bar[0]) + wedge(q.omega_bar[1], q.omega_bar[1]) +
                         wedge(q.omega_bar[2], q.omega_bar[2]));
  // on the level set ξ = −κ₂ and η = −κ₃
  const KFormField& xi = m.form("xi");
  const KFormField& eta = m.form("eta");
  q.alpha2 = pullback(psi, (4.0 * e2t) * (f * xi + h * eta));
  q.alpha3 = pullback(psi, (4.0 * e2t) * (h * xi - f * eta));
  q.beta = pullback(psi, (4.0 * e2t) * m.form("alpha"));
  q.z = 4.0 * VectorField::coordinate(3, 4);
  return q;
}

Residual frame_residual(const QuotientFrame& q, const std::vector<ChartPoint>& pts) {
  const auto& w = q.omega_bar;
  const std::array<KFormField, 6> r = {
      exterior_derivative(w[0]) - (wedge(-q.alpha2, w[1]) + wedge(q.alpha3, w[2])),
      exterior_derivative(w[1]) - (wedge(q.alpha2, w[0]) + wedge(q.beta, w[2])),
      exterior_derivative(w[2]) - (wedge(-q.alpha3, w[0]) + wedge(-q.beta, w[1])),
      exterior_derivative(q.beta) - (4.0 * w[0] + wedge(q.alpha2, q.alpha3)),
      exterior_derivative(q.alpha2) - (-4.0 * w[2] + wedge(q.alpha3, q.beta)),
      exterior_derivative(q.alpha3) - (-4.0 * w[1] + wedge(q.beta, q.alpha2)),
  };
  return max_residual(pts, [&](const ChartPoint& pt) {
    double m = 0.0;
    for (const auto& f : r) m = std::max(m, f(pt).max_abs());
    return m;
  });
}

Residual z_flat_residual(const QuotientFrame& q, const std::vector<ChartPoint>& pts) {
  const MetricField& g = q.quotient.metric;
  std::array<EndomorphismField, 3> ib;
  for (int i = 0; i < 3; ++i) ib[i] = acs_from_pair(g, q.omega_bar[i]);
  const ScalarField bz = as_function(interior_product(q.z, q.beta));
  const KFormField zf = 4.0 * flat(g, q.z);
  const std::array<KFormField, 3> r = {
      zf + precompose(exterior_derivative(KFormField::function(bz)), ib[0]),
      zf - bz * precompose(q.alpha2, ib[1]),
      zf + bz * precompose(q.alpha3, ib[2]),
  };
  return max_residual(pts, [&](const ChartPoint& pt) {
    double m = 0.0;
    for (const auto& f : r) m = std::max(m, f(pt).max_abs());
    return m;
  });
}

Residual z_curvature_residual(const QuotientFrame& q, const std::vector<ChartPoint>& pts) {
  const MetricField& g = q.quotient.metric;
  const KFormField dz = exterior_derivative(flat(g, q.z));
  const ScalarField bz = as_function(interior_product(q.z, q.beta));
  return max_residual(pts, [&](const ChartPoint& pt) {
    const Eigen::MatrixXd gi = g(pt).values().inverse();
    const auto ip = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      return 0.5 * (gi * a * gi).cwiseProduct(b).sum();
    };
    const Eigen::MatrixXd d = two_form_matrix(dz(pt)).values();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(d.rows(), d.cols());
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd w = two_form_matrix(q.omega_bar[i](pt)).values();
      proj += ip(d, w) / ip(w, w) * w;
    }
    const Eigen::MatrixXd target = bz(pt).value() * two_form_matrix(q.omega_bar[0](pt)).values();
    return (proj - target).cwiseAbs().maxCoeff();
  });
}

HKReconstruction hkqk_inverse(const QuotientFrame& q, int samples, std::uint64_t seed,
                              double tolerance) {
  const int qd = q.quotient.dim, dim = qd + 1;
  if (dim > kMaxDim) throw ArgumentError("hkqk_inverse: chart too large");
  const Residual fr = frame_residual(q, sample_points(q.quotient.domain, samples, seed));
  if (fr.value > tolerance) {
    throw PreconditionError("hkqk_inverse: frame equations fail (residual " +
                            std::to_string(fr.value) + " at " + format_point(fr.worst_point) + ")");
  }
  const MetricField& gr = q.quotient.metric;
  const ScalarField bz_q = as_function(interior_product(q.z, q.beta));
  const ScalarField bz = lift_scalar(bz_q, 1, dim);
  const ScalarField one = ScalarField::constant(dim, 1.0);
  const ScalarField ib = one / bz;
  const ScalarField x2 = 2.0 * lift_coordinate(0, dim);
  const ScalarField f = map(x2, qklab::cos), h = map(x2, qklab::sin);
  const KFormField dx = KFormField::basis(dim, {0});
  const KFormField beta = embed(q.beta, 1, dim);
  const KFormField a2 = embed(q.alpha2, 1, dim);
  const KFormField a3 = embed(q.alpha3, 1, dim);
  HKReconstruction r;
  r.dim = dim;
  r.frame_residual = fr.value;
  r.sigma[0] = -exterior_derivative(ib * (2.0 * dx - beta));
  r.sigma[1] = -exterior_derivative(ib * (h * a3 + f * a2));
  r.sigma[2] = -exterior_derivative(ib * (h * a2 - f * a3));
  const KFormField zf = embed(flat(gr, q.z), 1, dim);
  const ScalarField zz = lift_scalar(inner(gr, q.z, q.z), 1, dim);
  const KFormField zdb = embed(interior_product(q.z, exterior_derivative(q.beta)), 1, dim);
  r.xi = dx + 2.0 * (ib * zf) - 0.5 * beta;
  const ScalarField ib2 = ib * ib, ib3 = ib2 * ib;
  // ξ ⊙ Z♭ here stands for ξ⊗Z♭ + Z♭⊗ξ
  r.g = (4.0 * ib) * embed(gr, 1, dim) - (16.0 * ib3) * square(zf) +
        (16.0 * ib2) * symmetric_product(r.xi, zf) - ib * (square(a2) + square(a3)) -
        ((16.0 * zz) / (4.0 * bz * zz - bz * bz * bz)) * square(r.xi) - ib3 * square(zdb);
  r.z_lift = embed(q.z, 1, dim);
  return r;
}

}  // namespace qklab
