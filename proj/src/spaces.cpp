#include "qklab/spaces.hpp"

#include <cmath>

namespace qklab {

std::string to_string(KillingKind kind) {
  switch (kind) {
    case KillingKind::triholomorphic: return "triholomorphic";
    case KillingKind::permuting: return "permuting";
    case KillingKind::homothetic: return "homothetic";
    case KillingKind::vertical: return "vertical";
  }
  return "?";
}

std::string to_string(BundleModel which) {
  switch (which) {
    case BundleModel::Q: return "Q";
    case BundleModel::P: return "P";
    case BundleModel::L: return "L";
    case BundleModel::N: return "N";
  }
  return "?";
}

KFormField linear_one_form(int dim, const std::vector<LinearTerm>& terms) {
  for (const auto& t : terms) {
    if (t.coord < 0 || t.coord >= dim || t.differential < 0 || t.differential >= dim) {
      throw ArgumentError("linear_one_form: index outside the chart");
    }
  }
  return KFormField(dim, 1, [dim, terms](const ChartPoint& pt) {
    FormValue v(dim, 1);
    for (const auto& t : terms) v.add(Mask{1} << t.differential, t.c * pt.coordinate(t.coord));
    return v;
  });
}

namespace {

// Scalar field on a 1-dim t-chart evaluated on slot 0 of a bigger chart.
ScalarField lift_profile(const ScalarField& f, int dim) {
  return ScalarField(dim, [f, dim](const ChartPoint& pt) {
    return embed(f(ChartPoint{pt[0]}), 0, dim);
  });
}

ScalarField lift_scalar(const ScalarField& f, int offset, int dim) {
  const int m = f.dim();
  return ScalarField(dim, [f, offset, m, dim](const ChartPoint& pt) {
    std::vector<double> sub(pt.coords().begin() + offset, pt.coords().begin() + offset + m);
    return embed(f(ChartPoint(sub)), offset, dim);
  });
}

ScalarField t_function(int dim, Jet2 (*fn)(const Jet2&), double scale) {
  return ScalarField(dim, [dim, fn, scale](const ChartPoint& pt) {
    return fn(scale * pt.coordinate(0));
  });
}

// σ-terms as (i, j) pairs for block b.
std::array<std::vector<std::pair<int, int>>, 3> flat_sigma_pairs(int n) {
  std::array<std::vector<std::pair<int, int>>, 3> out;
  for (int b = 0; b < n; ++b) {
    const int o = 4 * b;
    out[0].push_back({o, o + 1});
    out[0].push_back({o + 2, o + 3});
    out[1].push_back({o, o + 2});
    out[1].push_back({o + 3, o + 1});
    out[2].push_back({o, o + 3});
    out[2].push_back({o + 1, o + 2});
  }
  return out;
}

KFormField constant_two_form(int dim, const std::vector<std::pair<int, int>>& pairs, double sign = 1.0) {
  FormValue v(dim, 2);
  for (auto [i, j] : pairs) v.add(std::vector<int>{i, j}, Jet2::constant(dim, sign));
  return KFormField(dim, 2, [v](const ChartPoint&) { return v; });
}

std::vector<ChartPoint> check_points(const Box& box, int count, std::uint64_t seed) {
  return sample_points(box, count, seed);
}

Box concat(const Box& a, const Box& b) {
  Box r = a;
  r.lo.insert(r.lo.end(), b.lo.begin(), b.lo.end());
  r.hi.insert(r.hi.end(), b.hi.begin(), b.hi.end());
  return r;
}

}  // namespace

// -- bases ------------------------------------------------------------------------

HKData flat_base(int n, bool torus, FlatPotentials potentials) {
  if (n < 1 || 4 * n > kMaxDim) throw ArgumentError("flat_base: n out of range");
  const int dim = 4 * n;
  HKData h;
  h.name = torus ? "T" + std::to_string(dim) : "R" + std::to_string(dim);
  h.dim = dim;
  for (int i = 0; i < dim; ++i) h.coords.push_back("x" + std::to_string(i + 1));
  h.g = MetricField::euclidean(dim);
  const auto pairs = flat_sigma_pairs(n);
  for (int i = 0; i < 3; ++i) h.sigma[i] = constant_two_form(dim, pairs[i]);
  std::array<KFormField, 3> kappa;
  for (int i = 0; i < 3; ++i) {
    std::vector<LinearTerm> terms;
    for (auto [a, b] : pairs[i]) {
      if (potentials == FlatPotentials::standard) {
        // x_a dx_b for the leading pair of each block, with the second pair
        // written so that d(x_c dx_d) = dx_c ∧ dx_d
        terms.push_back({1.0, a, b});
      } else {
        terms.push_back({0.5, a, b});
        terms.push_back({-0.5, b, a});
      }
    }
    kappa[i] = linear_one_form(dim, terms);
  }
  h.kappa = kappa;
  h.domain = uniform_box(dim, -1.0, 1.0);
  return h;
}

VectorField flat_homothetic_field(int dim) {
  return VectorField::linear(-Eigen::MatrixXd::Identity(dim, dim));
}

VectorField flat_permuting_field() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = -1;  // −x2 ∂1
  a(1, 0) = 1;   // x1 ∂2
  a(2, 3) = -1;  // −x4 ∂3
  a(3, 2) = 1;   // x3 ∂4
  return VectorField::linear(a);
}

VectorField flat_triholomorphic_field() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = -1;
  a(1, 0) = 1;
  a(2, 3) = 1;   // x4 ∂3
  a(3, 2) = -1;  // −x3 ∂4
  return VectorField::linear(a);
}

HKData gibbons_hawking(const ScalarField& v, const KFormField& theta,
                       std::optional<std::array<KFormField, 3>> kappa,
                       const GibbonsHawkingOptions& options) {
  if (v.dim() != 3) throw ArgumentError("gibbons_hawking: V must live on (u1, u2, u3)");
  if (theta.dim() != 4 || theta.degree() != 1) {
    throw ArgumentError("gibbons_hawking: theta must be a 1-form on (y, u1, u2, u3)");
  }
  // harmonicity and positivity on the check box
  const auto upts = check_points(options.check_box, options.check_samples, options.seed);
  for (const auto& pt : upts) {
    const Jet2 j = v(pt);
    if (!(j.value() > 0.0)) {
      throw ConstructionError("gibbons_hawking: V is not positive at " + format_point(pt.coords()));
    }
    const double lap = j.hess(0, 0) + j.hess(1, 1) + j.hess(2, 2);
    if (std::abs(lap) > options.tolerance) {
      throw ConstructionError("gibbons_hawking: V is not harmonic (Laplacian " +
                              std::to_string(lap) + " at " + format_point(pt.coords()) + ")");
    }
  }
  const ScalarField v4 = lift_scalar(v, 1, 4);
  // dθ = −∗dV
  const KFormField star_dv = embed(hodge_star(MetricField::euclidean(3),
                                              exterior_derivative(KFormField::function(v))),
                                   1, 4);
  const KFormField mismatch = exterior_derivative(theta) + star_dv;
  const Box box4 = concat(Box{{-1.0}, {1.0}}, options.check_box);
  for (const auto& pt : check_points(box4, options.check_samples, options.seed + 1)) {
    const double r = mismatch(pt).max_abs();
    if (r > options.tolerance) {
      throw ConstructionError("gibbons_hawking: d(theta) != -*dV (residual " + std::to_string(r) +
                              " at " + format_point(pt.coords()) + ")");
    }
  }
  HKData h;
  h.name = "GH";
  h.dim = 4;
  h.coords = {"y", "u1", "u2", "u3"};
  const auto du = [](int i) { return KFormField::basis(4, {i}); };
  h.sigma[0] = wedge(theta, du(1)) + v4 * KFormField::basis(4, {2, 3});
  h.sigma[1] = wedge(theta, du(2)) + v4 * KFormField::basis(4, {3, 1});
  h.sigma[2] = wedge(theta, du(3)) + v4 * KFormField::basis(4, {1, 2});
  MetricField flat3 = square(du(1)) + square(du(2)) + square(du(3));
  h.g = (ScalarField::constant(4, 1.0) / v4) * square(theta) + v4 * flat3;
  h.kappa = std::move(kappa);
  h.domain = box4;
  return h;
}

HKData gibbons_hawking_linear() {
  const ScalarField v = lift_coordinate(0, 3);
  const KFormField theta = KFormField::basis(4, {0}) + linear_one_form(4, {{1.0, 3, 2}});
  std::array<KFormField, 3> kappa;
  const ScalarField y = lift_coordinate(0, 4), u1 = lift_coordinate(1, 4), u3 = lift_coordinate(3, 4);
  const ScalarField none;
  kappa[0] = KFormField::one_form({none, y, -1.0 * (u1 * u3), none});
  kappa[1] = KFormField::one_form({none, none, y, -0.5 * (u1 * u1)});
  kappa[2] = KFormField::one_form({none, none, 0.5 * (u1 * u1) - 0.5 * (u3 * u3)  , y});
  HKData h = gibbons_hawking(v, theta, kappa);
  h.name = "GH(V=u1)";
  return h;
}

// -- bundle models --------------------------------------------------------------------

ProfileSet exponential_profiles(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("exponential_profiles: a, b must be positive");
  const ScalarField t = lift_coordinate(0, 1);
  ProfileSet s;
  s.p = a * map(b * t, qklab::exp);
  s.q = (2 * a * a * b) * map((2 * b) * t, qklab::exp);
  s.r = s.q;
  s.s = s.q;
  s.rate = b;
  return s;
}

const KFormField& SpaceModel::form(const std::string& key) const {
  auto it = forms.find(key);
  if (it == forms.end()) throw ArgumentError("model " + name + " has no form named '" + key + "'");
  return it->second;
}

const ComplexFormField& SpaceModel::complex_form(const std::string& key) const {
  auto it = complex_forms.find(key);
  if (it == complex_forms.end()) {
    throw ArgumentError("model " + name + " has no complex form named '" + key + "'");
  }
  return it->second;
}

double SpaceModel::expect(const std::string& key) const {
  auto it = expected.find(key);
  if (it == expected.end()) throw ArgumentError("model " + name + " expects no '" + key + "'");
  return it->second;
}

namespace {

int fibre_count(BundleModel which) {
  switch (which) {
    case BundleModel::Q: return 0;
    case BundleModel::P: return 1;
    case BundleModel::L: return 2;
    case BundleModel::N: return 3;
  }
  return 0;
}

// Chart (t, y_1..y_f, base) with dt, the connection forms and lifted σ_i.
SpaceModel bundle_skeleton(const HKData& base, int fibres, Box t_range) {
  if (fibres > 0 && !base.kappa) throw ArgumentError("bundle needs κ potentials on the base");
  SpaceModel m;
  m.n = base.quaternionic_dim();
  m.base_offset = 1 + fibres;
  m.dim = m.base_offset + base.dim;
  if (m.dim > kMaxDim) throw ArgumentError("bundle chart exceeds the maximum dimension");
  m.coords.push_back("t");
  for (int k = 0; k < fibres; ++k) m.coords.push_back("y" + std::to_string(k + 1));
  m.coords.insert(m.coords.end(), base.coords.begin(), base.coords.end());
  const int dim = m.dim, off = m.base_offset;
  m.forms["dt"] = KFormField::basis(dim, {0});
  const char* names[3] = {"alpha", "xi", "eta"};
  for (int k = 0; k < fibres; ++k) {
    const KFormField kap = embed((*base.kappa)[k], off, dim);
    const KFormField dy = KFormField::basis(dim, {1 + k});
    m.forms[names[k]] = k == 0 ? dy + kap : dy - kap;
  }
  for (int i = 0; i < 3; ++i) m.forms["sigma" + std::to_string(i + 1)] = embed(base.sigma[i], off, dim);
  Box fib = uniform_box(fibres, -1.0, 1.0);
  m.domain = concat(concat(t_range, fib), base.domain);
  return m;
}

long holonomy_expected(BundleModel which, int n) {
  switch (which) {
    case BundleModel::Q: return static_cast<long>(4 * n + 1) * (4 * n) / 2;  // so(4n+1)
    case BundleModel::P: return static_cast<long>(2 * n + 1) * (2 * n + 1);  // u(2n+1)
    case BundleModel::L: return static_cast<long>(4 * n + 3) * (4 * n + 2) / 2;  // so(4n+3)
    case BundleModel::N: return static_cast<long>(n + 1) * (2 * n + 3) + 3;  // sp(n+1) ⊕ sp(1)
  }
  return 0;
}

}  // namespace

SpaceModel build_bundle(const HKData& base, BundleModel which, const ProfileSet& profiles) {
  const int fibres = fibre_count(which);
  SpaceModel m = bundle_skeleton(base, fibres, Box{{-0.5}, {0.5}});
  m.kind = to_string(which);
  m.name = to_string(which) + " over " + base.name;
  const int dim = m.dim, off = m.base_offset;
  if (!profiles.p.valid()) throw ArgumentError("build_bundle: profile p is required");
  const ScalarField p = lift_profile(profiles.p, dim);
  MetricField g = square(m.forms["dt"]) + (p * p) * embed(base.g, off, dim);
  const ScalarField* fp[3] = {&profiles.q, &profiles.r, &profiles.s};
  const char* names[3] = {"alpha", "xi", "eta"};
  std::array<ScalarField, 3> f;
  for (int k = 0; k < fibres; ++k) {
    if (!fp[k]->valid()) throw ArgumentError("build_bundle: missing fibre profile");
    f[k] = lift_profile(*fp[k], dim);
    g = g + (f[k] * f[k]) * square(m.forms[names[k]]);
  }
  m.metric = g;
  m.profiles = profiles;
  const KFormField& dt = m.forms["dt"];
  const ScalarField p2 = p * p;
  if (which == BundleModel::P) {
    m.forms["omega_P"] = wedge(f[0] * dt, m.forms["alpha"]) + p2 * m.forms["sigma1"];
  }
  if (which == BundleModel::N) {
    const KFormField qa = f[0] * m.forms["alpha"];
    const KFormField rx = f[1] * m.forms["xi"];
    const KFormField se = f[2] * m.forms["eta"];
    const KFormField w1 = p2 * m.forms["sigma1"] + wedge(rx, se) + wedge(dt, qa);
    const KFormField w2 = p2 * m.forms["sigma2"] + wedge(rx, dt) + wedge(qa, se);
    const KFormField w3 = p2 * m.forms["sigma3"] + wedge(rx, qa) + wedge(se, dt);
    m.forms["omega1"] = w1;
    m.forms["omega2"] = w2;
    m.forms["omega3"] = w3;
    m.forms["Omega"] = 0.5 * (wedge(w1, w1) + wedge(w2, w2) + wedge(w3, w3));
    const ScalarField conf = t_function(dim, qklab::exp, -4.0 / (2 * m.n + 1));
    m.forms["omega1_conformal"] = conf * w1;
    m.forms["omega2_conformal"] = conf * w2;
    m.forms["omega3_conformal"] = conf * w3;
  }
  const double c = which == BundleModel::N   ? 4.0 * m.n + 12
                   : which == BundleModel::L ? 4.0 * m.n + 8
                   : which == BundleModel::P ? 4.0 * m.n + 4
                                             : 4.0 * m.n;
  if (profiles.rate) m.expected["lambda"] = -c * *profiles.rate * *profiles.rate;
  m.expected["holonomy_dim"] = static_cast<double>(holonomy_expected(which, m.n));
  return m;
}

std::array<KFormField, 3> flat_asd_potentials() {
  return {linear_one_form(4, {{1.0, 0, 1}, {-1.0, 2, 3}}),
          linear_one_form(4, {{1.0, 0, 2}, {-1.0, 3, 1}}),
          linear_one_form(4, {{1.0, 0, 3}, {-1.0, 1, 2}})};
}

namespace {

ComplexFormField complex_of(const KFormField& re, const KFormField& im) {
  return ComplexFormField(re, im);
}

ComplexFormField complex_power(const ComplexFormField& a, int n) {
  ComplexFormField acc = a;
  for (int k = 1; k < n; ++k) acc = wedge(acc, a);
  return acc;
}

// Curvature γ of a base potential lies in sp(n): anti-self-dual in dimension 4,
// otherwise of type (1,1) for each I_i.
void require_spn(const HKData& base, const KFormField& pot, int index) {
  const KFormField gamma = exterior_derivative(pot);
  const auto pts = sample_points(base.domain, 10, 977);
  double worst = 0.0;
  ChartPoint where;
  if (base.dim == 4) {
    const KFormField sd = hodge_star(base.g, gamma) + gamma;
    for (const auto& pt : pts) {
      const double r = sd(pt).max_abs();
      if (r > worst) worst = r, where = pt;
    }
  } else {
    for (int i = 0; i < 3; ++i) {
      const EndomorphismField j = acs_from_pair(base.g, base.sigma[i]);
      for (const auto& pt : pts) {
        const Eigen::MatrixXd gm = two_form_matrix(gamma(pt)).values();
        const Eigen::MatrixXd jm = j(pt).values();
        const double r = (jm.transpose() * gm * jm - gm).cwiseAbs().maxCoeff();
        if (r > worst) worst = r, where = pt;
      }
    }
  }
  if (worst > 1e-9) {
    throw ConstructionError("curvature of fibre potential " + std::to_string(index + 1) +
                            " is not in sp(n) (residual " + std::to_string(worst) + " at " +
                            format_point(where.coords()) + ")");
  }
}

}  // namespace

SpaceModel build_hypercomplex(const HKData& base, HypercomplexShape shape,
                              const std::vector<KFormField>& potentials, bool validate) {
  const int n = base.quaternionic_dim();
  const int off = 4, dim = 4 + base.dim;
  if (dim > kMaxDim) throw ArgumentError("hypercomplex chart exceeds the maximum dimension");
  if (shape == HypercomplexShape::connection && potentials.size() != 1) {
    throw ArgumentError("connection shape takes exactly one fibre potential");
  }
  if (shape == HypercomplexShape::abelian && (potentials.empty() || potentials.size() > 4)) {
    throw ArgumentError("abelian shape takes one to four fibre potentials");
  }
  if (shape == HypercomplexShape::connection && !base.kappa) {
    throw ArgumentError("connection shape needs κ potentials on the base");
  }
  for (std::size_t k = 0; k < potentials.size(); ++k) {
    if (potentials[k].dim() != base.dim || potentials[k].degree() != 1) {
      throw ArgumentError("fibre potential must be a 1-form on the base");
    }
    if (validate) require_spn(base, potentials[k], static_cast<int>(k));
  }
  SpaceModel m;
  m.n = n;
  m.dim = dim;
  m.base_offset = off;
  for (int k = 0; k < 4; ++k) m.coords.push_back("y" + std::to_string(k + 1));
  m.coords.insert(m.coords.end(), base.coords.begin(), base.coords.end());
  m.domain = concat(uniform_box(4, -1.0, 1.0), base.domain);
  std::array<KFormField, 3> s;
  for (int i = 0; i < 3; ++i) {
    s[i] = embed(base.sigma[i], off, dim);
    m.forms["sigma" + std::to_string(i + 1)] = s[i];
  }
  std::array<KFormField, 4> nu;
  for (int k = 0; k < 4; ++k) {
    KFormField dy = KFormField::basis(dim, {k});
    if (shape == HypercomplexShape::connection) {
      if (k < 3) {
        const KFormField kap = embed((*base.kappa)[k], off, dim);
        nu[k] = k == 0 ? dy + kap : dy - kap;
      } else {
        nu[k] = dy + embed(potentials[0], off, dim);
      }
    } else {
      nu[k] = k < static_cast<int>(potentials.size()) ? dy + embed(potentials[k], off, dim) : dy;
    }
  }
  MetricField g = embed(base.g, off, dim);
  for (const auto& f : nu) g = g + square(f);
  m.metric = g;
  const auto cpow = [&](int a, int b) { return complex_power(complex_of(s[a], s[b]), n); };
  if (shape == HypercomplexShape::connection) {
    m.kind = "hypercomplex";
    m.name = "M(alpha,xi,eta,nu) over " + base.name;
    const KFormField &alpha = nu[0], &xi = nu[1], &eta = nu[2], &v = nu[3];
    m.forms["alpha"] = alpha;
    m.forms["xi"] = xi;
    m.forms["eta"] = eta;
    m.forms["nu"] = v;
    m.forms["omega1"] = s[0] + wedge(xi, eta) + wedge(v, alpha);
    m.forms["omega2"] = s[1] + wedge(xi, v) + wedge(alpha, eta);
    m.forms["omega3"] = s[2] + wedge(xi, alpha) + wedge(eta, v);
    m.complex_forms["Upsilon1"] =
        wedge(wedge(cpow(1, 2), complex_of(xi, eta)), complex_of(v, alpha));
    m.complex_forms["Upsilon2"] =
        wedge(wedge(cpow(2, 0), complex_of(xi, v)), complex_of(alpha, eta));
    m.complex_forms["Upsilon3"] =
        wedge(wedge(cpow(0, 1), complex_of(xi, alpha)), complex_of(eta, v));
  } else {
    m.kind = "hypercomplex_abelian";
    m.name = "M(nu1..nu4) over " + base.name;
    for (int k = 0; k < 4; ++k) m.forms["nu" + std::to_string(k + 1)] = nu[k];
    m.forms["omega1"] = s[0] + wedge(nu[0], nu[1]) + wedge(nu[2], nu[3]);
    m.forms["omega2"] = s[1] + wedge(nu[0], nu[2]) + wedge(nu[3], nu[1]);
    m.forms["omega3"] = s[2] + wedge(nu[0], nu[3]) + wedge(nu[1], nu[2]);
    m.complex_forms["Upsilon1"] =
        wedge(wedge(cpow(1, 2), complex_of(nu[0], nu[1])), complex_of(nu[2], nu[3]));
    m.complex_forms["Upsilon2"] =
        wedge(wedge(cpow(2, 0), complex_of(nu[0], nu[2])), complex_of(nu[3], nu[1]));
    m.complex_forms["Upsilon3"] =
        wedge(wedge(cpow(0, 1), complex_of(nu[0], nu[3])), complex_of(nu[1], nu[2]));
  }
  return m;
}

SpaceModel build_balanced_xi_eta(const HKData& base) {
  if (!base.kappa) throw ArgumentError("balanced (xi, eta) bundle needs κ potentials");
  const int n = base.quaternionic_dim();
  const int off = 2, dim = 2 + base.dim;
  if (dim > kMaxDim) throw ArgumentError("chart exceeds the maximum dimension");
  SpaceModel m;
  m.kind = "balanced_xi_eta";
  m.name = "M(xi,eta) over " + base.name;
  m.n = n;
  m.dim = dim;
  m.base_offset = off;
  m.coords = {"y2", "y3"};
  m.coords.insert(m.coords.end(), base.coords.begin(), base.coords.end());
  m.domain = concat(uniform_box(2, -1.0, 1.0), base.domain);
  std::array<KFormField, 3> s;
  for (int i = 0; i < 3; ++i) {
    s[i] = embed(base.sigma[i], off, dim);
    m.forms["sigma" + std::to_string(i + 1)] = s[i];
  }
  const KFormField xi = KFormField::basis(dim, {0}) - embed((*base.kappa)[1], off, dim);
  const KFormField eta = KFormField::basis(dim, {1}) - embed((*base.kappa)[2], off, dim);
  m.forms["xi"] = xi;
  m.forms["eta"] = eta;
  m.metric = square(xi) + square(eta) + embed(base.g, off, dim);
  m.forms["omega"] = wedge(xi, eta) + s[0];
  m.complex_forms["Upsilon"] = wedge(complex_of(xi, eta), complex_power(complex_of(s[1], s[2]), n));
  return m;
}

SpaceModel ricci_flat_special(const HKData& base, RicciFlatSpecial which, double b, double c) {
  const Box t_range{{0.5}, {3.0}};
  if (which == RicciFlatSpecial::calabi_P) {
    const int n = base.quaternionic_dim();
    const ScalarField t = lift_coordinate(0, 1);
    ProfileSet pr;
    pr.p = pow(t, 1.0 / (2 * n + 2));
    // Kähler constraint q = 2 p p'
    const double k = 1.0 / (2 * n + 2);
    pr.q = (2.0 * k) * pow(t, 2.0 * k - 1.0);
    SpaceModel m = build_bundle(base, BundleModel::P, pr);
    m.kind = "calabi_P";
    m.name = "Calabi P over " + base.name;
    m.domain.lo[0] = t_range.lo[0];
    m.domain.hi[0] = t_range.hi[0];
    m.expected.clear();
    m.expected["lambda"] = 0.0;
    return m;
  }
  if (base.dim != 4) throw ArgumentError("G2/Spin(7) specials need a 4-dimensional base");
  if (!(b > 0.0) || !(c > 0.0)) throw ArgumentError("G2/Spin(7) specials need b, c > 0");
  const bool spin7 = which == RicciFlatSpecial::spin7_N8;
  SpaceModel m = bundle_skeleton(base, spin7 ? 3 : 2, t_range);
  const int dim = m.dim;
  const ScalarField t = lift_coordinate(0, dim);
  const ScalarField tb = t + b, tc = t + c;
  const ScalarField one = ScalarField::constant(dim, 1.0);
  ScalarField lapse = t * tb;
  ScalarField warp = t * tb;
  if (spin7) {
    lapse = lapse * tc;
    warp = warp * tc;
  }
  const KFormField& dt = m.forms["dt"];
  MetricField g = (lapse * lapse) * square(dt) + (one / (t * t)) * square(m.forms["alpha"]) +
                  (one / (tb * tb)) * square(m.forms["xi"]) +
                  warp * embed(base.g, m.base_offset, dim);
  if (spin7) g = g + (one / (tc * tc)) * square(m.forms["eta"]);
  m.metric = MetricField(dim, [g](const ChartPoint& pt) {
    if (!(pt[0] > 0.0)) throw EvaluationError("Ricci-flat special needs t > 0", pt.coords());
    return g(pt);
  });
  m.kind = spin7 ? "spin7_N8" : "as_G2_L7";
  m.name = (spin7 ? "Spin(7) N8 over " : "G2 L7 over ") + base.name;
  m.expected["lambda"] = 0.0;
  return m;
}

// -- checks -----------------------------------------------------------------------------

Residual form_residual(const KFormField& f, const std::vector<ChartPoint>& pts) {
  return max_residual(pts, [&](const ChartPoint& pt) { return f(pt).max_abs(); });
}

Residual form_residual(const ComplexFormField& f, const std::vector<ChartPoint>& pts) {
  return max_residual(pts, [&](const ChartPoint& pt) {
    return std::max(f.re()(pt).max_abs(), f.im()(pt).max_abs());
  });
}

Residual balanced_check(const SpaceModel& model, const std::string& which_form, int power,
                        const std::vector<ChartPoint>& pts) {
  const KFormField& w = model.form(which_form);
  if (w.degree() != 2) throw ArgumentError("balanced_check: '" + which_form + "' is not a 2-form");
  return form_residual(exterior_derivative(wedge_power(w, power)), pts);
}

Residual structure_equation_residual(const SpaceModel& model, const std::vector<ChartPoint>& pts) {
  if (model.kind != "N") throw ArgumentError("structure equations are defined on N models");
  const int dim = model.dim;
  const ScalarField e2t = 4.0 * t_function(dim, qklab::exp, 2.0);
  const KFormField fa = e2t * model.form("alpha");
  const KFormField fx = e2t * model.form("xi");
  const KFormField fe = e2t * model.form("eta");
  const KFormField& w1 = model.form("omega1");
  const KFormField& w2 = model.form("omega2");
  const KFormField& w3 = model.form("omega3");
  const std::array<KFormField, 3> r = {
      exterior_derivative(w1) - (wedge(-fe, w2) + wedge(fx, w3)),
      exterior_derivative(w2) - (wedge(fe, w1) + wedge(fa, w3)),
      exterior_derivative(w3) - (wedge(-fx, w1) + wedge(-fa, w2)),
  };
  return max_residual(pts, [&](const ChartPoint& pt) {
    double m = 0.0;
    for (const auto& f : r) m = std::max(m, f(pt).max_abs());
    return m;
  });
}

namespace {

// max |I_a I_b − sign I_c| over the cyclic triples, plus Hermitian and J² residuals.
double triple_residual(const MetricField& g, const std::array<KFormField, 3>& w,
                       const ChartPoint& pt, double sign) {
  std::array<Eigen::MatrixXd, 3> j;
  double worst = 0.0;
  const Eigen::MatrixXd gv = g(pt).values();
  for (int i = 0; i < 3; ++i) {
    j[i] = acs_from_pair(g, w[i])(pt).values();
    worst = std::max(worst, (j[i].transpose() * gv * j[i] - gv).cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < 3; ++i) {
    const Eigen::MatrixXd prod = j[i] * j[(i + 1) % 3];
    worst = std::max(worst, (prod - sign * j[(i + 2) % 3]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

Residual hk_invariants_residual(const HKData& base, const std::vector<ChartPoint>& pts) {
  std::array<KFormField, 3> ds;
  for (int i = 0; i < 3; ++i) ds[i] = exterior_derivative(base.sigma[i]);
  return max_residual(pts, [&](const ChartPoint& pt) {
    double worst = 0.0;
    std::array<FormValue, 3> s;
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, ds[i](pt).max_abs());
      s[i] = base.sigma[i](pt);
    }
    if (base.dim == 4) {
      const FormValue vol = wedge(s[0], s[0]);
      for (int i = 0; i < 3; ++i)
        for (int k = i; k < 3; ++k) {
          FormValue d = wedge(s[i], s[k]);
          if (i == k) d -= vol;
          worst = std::max(worst, d.max_abs());
        }
    }
    return std::max(worst, triple_residual(base.g, base.sigma, pt, 1.0));
  });
}

Residual potential_residual(const HKData& base, const std::vector<ChartPoint>& pts) {
  if (!base.kappa) throw ArgumentError("base has no κ potentials");
  std::array<KFormField, 3> r;
  for (int i = 0; i < 3; ++i) r[i] = exterior_derivative((*base.kappa)[i]) - base.sigma[i];
  return max_residual(pts, [&](const ChartPoint& pt) {
    double m = 0.0;
    for (const auto& f : r) m = std::max(m, f(pt).max_abs());
    return m;
  });
}

Residual quaternionic_residual(const SpaceModel& model, const std::vector<ChartPoint>& pts) {
  const std::array<KFormField, 3> w = {model.form("omega1"), model.form("omega2"),
                                       model.form("omega3")};
  return max_residual(pts, [&](const ChartPoint& pt) {
    return triple_residual(model.metric, w, pt, 1.0);
  });
}

Residual submersion_residual(const SpaceModel& model, const HKData& base,
                             const std::vector<ChartPoint>& pts) {
  if (!model.profiles) throw ArgumentError("submersion check needs a profile-based model");
  const int off = model.base_offset, dim = model.dim;
  std::vector<KFormField> fibre;
  for (const char* k : {"alpha", "xi", "eta"})
    if (model.forms.count(k)) fibre.push_back(model.form(k));
  return max_residual(pts, [&](const ChartPoint& pt) {
    const Eigen::MatrixXd g = model.metric(pt).values();
    std::vector<double> sub(pt.coords().begin() + off, pt.coords().end());
    const Eigen::MatrixXd gm = base.g(ChartPoint(sub)).values();
    const double p = model.profiles->p(ChartPoint{pt[0]}).value();
    std::vector<FormValue> fv;
    for (const auto& f : fibre) fv.push_back(f(pt));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, base.dim);
    for (int a = 0; a < base.dim; ++a) {
      h(off + a, a) = 1.0;
      for (std::size_t k = 0; k < fv.size(); ++k)
        h(1 + static_cast<int>(k), a) = -fv[k].coeff(Mask{1} << (off + a)).value();
    }
    return (h.transpose() * g * h - p * p * gm).cwiseAbs().maxCoeff();
  });
}

}  // namespace qklab
