#include "qklab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <list>
#include <random>
#include <set>
#include <sstream>

#include "qklab/einstein_ode.hpp"
#include "qklab/expression.hpp"
#include "qklab/reduction.hpp"

namespace qklab {

ScenarioError::ScenarioError(const std::string& where, const std::string& message)
    : std::invalid_argument(where.empty() ? message : where + ": " + message), where_(where) {}

namespace {

using json = nlohmann::json;

// -- reading the document ------------------------------------------------------------------

std::string at(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  require_object(j, path);
  for (const auto& item : j.items()) {
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
    if (!known) throw ScenarioError(at(path, item.key()), "unknown key");
  }
}

double number(const json& j, const std::string& path, const std::string& key, std::optional<double> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(at(path, key), "missing number");
  }
  if (!j.at(key).is_number()) throw ScenarioError(at(path, key), "expected a number");
  return j.at(key).get<double>();
}

std::optional<double> maybe_number(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  return number(j, path, key);
}

int integer(const json& j, const std::string& path, const std::string& key, std::optional<int> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(at(path, key), "missing integer");
  }
  if (!j.at(key).is_number_integer()) throw ScenarioError(at(path, key), "expected an integer");
  return j.at(key).get<int>();
}

std::string text(const json& j, const std::string& path, const std::string& key,
                 std::optional<std::string> fallback = {}) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(at(path, key), "missing string");
  }
  if (!j.at(key).is_string()) throw ScenarioError(at(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

bool flag(const json& j, const std::string& path, const std::string& key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ScenarioError(at(path, key), "expected true or false");
  return j.at(key).get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ScenarioError(at(path, i), "expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::pair<double, double> range(const json& j, const std::string& path, const std::string& key,
                                std::pair<double, double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = numbers(j.at(key), at(path, key));
  if (v.size() != 2 || !(v[0] <= v[1])) throw ScenarioError(at(path, key), "expected [lo, hi] with lo <= hi");
  return {v[0], v[1]};
}

ScalarField expression(const json& j, const std::string& path, const std::vector<std::string>& coords) {
  if (j.is_number()) return ScalarField::constant(static_cast<int>(coords.size()), j.get<double>());
  if (!j.is_string()) throw ScenarioError(path, "expected an expression string");
  try {
    return parse_expression(j.get<std::string>(), coords);
  } catch (const ParseError& e) {
    throw ScenarioError(path, std::string("expression: ") + e.what());
  }
}

/// {coord: expr, …} → Σ f dx_coord.
KFormField one_form(const json& j, const std::string& path, const std::vector<std::string>& coords) {
  require_object(j, path);
  const int dim = static_cast<int>(coords.size());
  std::vector<ScalarField> comps(dim, ScalarField::constant(dim, 0.0));
  for (const auto& item : j.items()) {
    const auto it = std::find(coords.begin(), coords.end(), item.key());
    if (it == coords.end()) throw ScenarioError(at(path, item.key()), "not a coordinate of this chart");
    comps[it - coords.begin()] = expression(item.value(), at(path, item.key()), coords);
  }
  return KFormField::one_form(comps);
}

VectorField vector_field(const json& j, const std::string& path, const std::vector<std::string>& coords) {
  require_object(j, path);
  const int dim = static_cast<int>(coords.size());
  std::vector<ScalarField> comps(dim, ScalarField::constant(dim, 0.0));
  for (const auto& item : j.items()) {
    const auto it = std::find(coords.begin(), coords.end(), item.key());
    if (it == coords.end()) throw ScenarioError(at(path, item.key()), "not a coordinate of this chart");
    comps[it - coords.begin()] = expression(item.value(), at(path, item.key()), coords);
  }
  return VectorField::from_components(comps);
}

/// Either {"lo": [...], "hi": [...]} or {coord: [lo, hi], …} overriding parts of `base`.
Box box_override(const json& j, const std::string& path, const Box& base, const std::vector<std::string>& coords) {
  require_object(j, path);
  Box b = base;
  if (j.contains("lo") || j.contains("hi")) {
    allow_keys(j, path, {"lo", "hi"});
    b.lo = numbers(j.at("lo"), at(path, "lo"));
    b.hi = numbers(j.at("hi"), at(path, "hi"));
    if (b.lo.size() != base.lo.size() || b.hi.size() != base.lo.size())
      throw ScenarioError(path, "box needs " + std::to_string(base.lo.size()) + " bounds per side");
  } else {
    for (const auto& item : j.items()) {
      const auto it = std::find(coords.begin(), coords.end(), item.key());
      if (it == coords.end()) throw ScenarioError(at(path, item.key()), "not a coordinate of this chart");
      const auto r = range(j, path, item.key(), {0, 0});
      b.lo[it - coords.begin()] = r.first;
      b.hi[it - coords.begin()] = r.second;
    }
  }
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.lo[i] <= b.hi[i])) throw ScenarioError(path, "box has lo > hi in slot " + std::to_string(i));
  return b;
}

// -- building the geometry -------------------------------------------------------------------

VectorField named_field(const std::string& name, const HKData& base, const std::string& path) {
  if (name == "base") {
    if (!base.killing) throw ScenarioError(path, "base carries no Killing field");
    return *base.killing;
  }
  if (name == "homothetic") return flat_homothetic_field(base.dim);
  if (base.dim != 4 || base.coords.front() != "x1")
    throw ScenarioError(path, "the named field '" + name + "' exists on flat R^4 only");
  if (name == "permuting") return flat_permuting_field();
  if (name == "triholomorphic") return flat_triholomorphic_field();
  throw ScenarioError(path, "unknown field '" + name + "' (base, permuting, triholomorphic, homothetic)");
}

HKData build_base(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string type = text(j, path, "type");
  HKData base;
  if (type == "flat") {
    allow_keys(j, path, {"type", "n", "torus", "potentials", "killing"});
    const int n = integer(j, path, "n", 1);
    if (n < 1 || n > 2) throw ScenarioError(at(path, "n"), "n must be 1 or 2");
    const std::string pot = text(j, path, "potentials", "standard");
    if (pot != "standard" && pot != "radial") throw ScenarioError(at(path, "potentials"), "standard or radial");
    base = flat_base(n, flag(j, path, "torus", false),
                     pot == "radial" ? FlatPotentials::radial : FlatPotentials::standard);
  } else if (type == "gibbons_hawking_linear") {
    allow_keys(j, path, {"type", "killing"});
    base = gibbons_hawking_linear();
  } else if (type == "example1") {
    allow_keys(j, path, {"type", "killing"});
    base = example1_base();
  } else if (type == "gibbons_hawking") {
    allow_keys(j, path, {"type", "V", "theta", "kappa", "killing"});
    const std::vector<std::string> u{"u1", "u2", "u3"};
    const std::vector<std::string> chart{"y", "u1", "u2", "u3"};
    const ScalarField v = expression(j.contains("V") ? j.at("V") : json(), at(path, "V"), u);
    if (!j.contains("theta")) throw ScenarioError(at(path, "theta"), "missing one-form");
    const KFormField theta = one_form(j.at("theta"), at(path, "theta"), chart);
    std::optional<std::array<KFormField, 3>> kappa;
    if (j.contains("kappa")) {
      const json& k = j.at("kappa");
      if (!k.is_array() || k.size() != 3) throw ScenarioError(at(path, "kappa"), "expected three one-forms");
      kappa.emplace();
      for (std::size_t i = 0; i < 3; ++i) (*kappa)[i] = one_form(k[i], at(at(path, "kappa"), i), chart);
    }
    try {
      base = gibbons_hawking(v, theta, kappa);
    } catch (const ConstructionError& e) {
      throw ScenarioError(path, e.what());
    }
  } else {
    throw ScenarioError(at(path, "type"), "unknown base '" + type + "'");
  }
  if (j.contains("killing")) {
    const json& k = j.at("killing");
    if (k.is_string()) base.killing = named_field(k.get<std::string>(), base, at(path, "killing"));
    else base.killing = vector_field(k, at(path, "killing"), base.coords);
  }
  return base;
}

KillingKind kind_from(const std::string& s, const std::string& path) {
  for (auto k : {KillingKind::triholomorphic, KillingKind::permuting, KillingKind::homothetic, KillingKind::vertical})
    if (to_string(k) == s) return k;
  throw ScenarioError(path, "unknown action kind '" + s + "'");
}

LiftedAction build_actions(const json& j, const std::string& path, const HKData& base) {
  if (!j.is_array() || j.empty()) throw ScenarioError(path, "expected a non-empty array");
  std::vector<std::pair<double, LiftedAction>> terms;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = at(path, i);
    allow_keys(j[i], p, {"kind", "weight", "a", "b", "c", "field"});
    const KillingKind kind = kind_from(text(j[i], p, "kind"), at(p, "kind"));
    HKData b = base;
    if (kind != KillingKind::vertical) {
      if (j[i].contains("field")) {
        const json& f = j[i].at("field");
        b.killing = f.is_string() ? named_field(f.get<std::string>(), base, at(p, "field"))
                                  : vector_field(f, at(p, "field"), base.coords);
      } else if (!b.killing) {
        b.killing = named_field(to_string(kind), base, p);
      }
    }
    const LiftConstants c{number(j[i], p, "a", 0.0), number(j[i], p, "b", 0.0), number(j[i], p, "c", 0.0)};
    try {
      terms.emplace_back(number(j[i], p, "weight", 1.0), build_lift(b, kind, c));
    } catch (const ConstructionError& e) {
      throw ScenarioError(p, e.what());
    }
  }
  if (terms.size() == 1 && terms.front().first == 1.0) return terms.front().second;
  return combine_lifts(terms);
}

BundleModel bundle_from(const std::string& s, const std::string& path) {
  for (auto w : {BundleModel::Q, BundleModel::P, BundleModel::L, BundleModel::N})
    if (to_string(w) == s) return w;
  throw ScenarioError(path, "unknown bundle '" + s + "' (Q, P, L, N)");
}

ProfileSet build_profiles(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.contains("exponential")) {
    allow_keys(j, path, {"exponential"});
    const std::string p = at(path, "exponential");
    allow_keys(j.at("exponential"), p, {"a", "b"});
    return exponential_profiles(number(j.at("exponential"), p, "a", 1.0), number(j.at("exponential"), p, "b", 1.0));
  }
  allow_keys(j, path, {"p", "q", "r", "s", "rate"});
  const std::vector<std::string> t{"t"};
  ProfileSet ps;
  ScalarField* slots[] = {&ps.p, &ps.q, &ps.r, &ps.s};
  const char* names[] = {"p", "q", "r", "s"};
  for (int k = 0; k < 4; ++k)
    if (j.contains(names[k])) *slots[k] = expression(j.at(names[k]), at(path, names[k]), t);
  ps.rate = maybe_number(j, path, "rate");
  return ps;
}

KFormField named_potential(const json& j, const std::string& path, const HKData& base) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "asd1" || s == "asd2" || s == "asd3") {
      if (base.dim != 4 || base.coords.front() != "x1") throw ScenarioError(path, "asd potentials live on flat R^4");
      return flat_asd_potentials()[s.back() - '1'];
    }
    if (s == "kappa1" || s == "kappa2" || s == "kappa3") {
      if (!base.kappa) throw ScenarioError(path, "base has no potentials");
      return (*base.kappa)[s.back() - '1'];
    }
    if (s == "zero") return KFormField::zero(base.dim, 1);
    throw ScenarioError(path, "unknown potential '" + s + "' (asd1..3, kappa1..3, zero)");
  }
  return one_form(j, path, base.coords);
}

struct Env {
  std::optional<HKData> base;
  std::optional<LiftedAction> action;
  std::optional<SpaceModel> model;
  std::optional<BundleModel> bundle;
  std::uint64_t seed = 1;
  int samples = 20;
  std::optional<Box> box;
};

SpaceModel build_model(const json& j, const std::string& path, Env& env) {
  require_object(j, path);
  const std::string type = text(j, path, "type");
  if (!env.base) throw ScenarioError(path, "a model needs a base");
  // lifts adapt the base potentials; the bundle has to use them
  const HKData& base = env.action ? env.action->base : *env.base;
  if (type == "bundle") {
    allow_keys(j, path, {"type", "which", "profiles"});
    env.bundle = bundle_from(text(j, path, "which"), at(path, "which"));
    const ProfileSet ps = j.contains("profiles") ? build_profiles(j.at("profiles"), at(path, "profiles"))
                                                 : exponential_profiles();
    return build_bundle(base, *env.bundle, ps);
  }
  if (type == "hypercomplex") {
    allow_keys(j, path, {"type", "shape", "potentials", "validate"});
    const std::string shape = text(j, path, "shape");
    if (shape != "connection" && shape != "abelian") throw ScenarioError(at(path, "shape"), "connection or abelian");
    if (!j.contains("potentials") || !j.at("potentials").is_array())
      throw ScenarioError(at(path, "potentials"), "expected an array");
    std::vector<KFormField> pots;
    for (std::size_t i = 0; i < j.at("potentials").size(); ++i)
      pots.push_back(named_potential(j.at("potentials")[i], at(at(path, "potentials"), i), base));
    try {
      return build_hypercomplex(base, shape == "connection" ? HypercomplexShape::connection : HypercomplexShape::abelian,
                                pots, flag(j, path, "validate", true));
    } catch (const ConstructionError& e) {
      throw ScenarioError(path, e.what());
    }
  }
  if (type == "balanced_xi_eta") {
    allow_keys(j, path, {"type"});
    return build_balanced_xi_eta(base);
  }
  if (type == "special") {
    allow_keys(j, path, {"type", "which", "b", "c"});
    const std::string w = text(j, path, "which");
    RicciFlatSpecial which;
    if (w == "calabi_P") {
      which = RicciFlatSpecial::calabi_P;
      env.bundle = BundleModel::P;
    } else if (w == "as_G2_L7") {
      which = RicciFlatSpecial::as_G2_L7;
    } else if (w == "spin7_N8") {
      which = RicciFlatSpecial::spin7_N8;
    } else {
      throw ScenarioError(at(path, "which"), "unknown special '" + w + "' (calabi_P, as_G2_L7, spin7_N8)");
    }
    return ricci_flat_special(base, which, number(j, path, "b", 1.0), number(j, path, "c", 2.0));
  }
  throw ScenarioError(at(path, "type"), "unknown model '" + type + "'");
}

// -- checks ------------------------------------------------------------------------------------

struct RowSpec {
  std::string name;
  double default_tolerance;
};

struct Measured {
  double value = 0.0;
  std::vector<double> worst;
  std::string detail;
};

Measured from(const Residual& r, std::string detail = {}) { return {r.value, r.worst_point, std::move(detail)}; }

struct Plan {
  std::string type;
  std::string path;
  std::optional<double> own_tolerance;
  std::vector<RowSpec> rows;
  std::function<std::vector<Measured>()> run;
};

struct CheckInput {
  const json& spec;
  std::string path;
  std::string label;  // explicit "name" or the type
  const Env& env;
  int samples;
  std::uint64_t seed;
  std::optional<json> box;
};

const SpaceModel& need_model(const CheckInput& c) {
  if (!c.env.model) throw ScenarioError(c.path, "check needs a model");
  return *c.env.model;
}

const HKData& need_base(const CheckInput& c) {
  if (!c.env.base) throw ScenarioError(c.path, "check needs a base");
  return *c.env.base;
}

const LiftedAction& need_action(const CheckInput& c) {
  if (!c.env.action) throw ScenarioError(c.path, "check needs an action");
  return *c.env.action;
}

void need_form(const SpaceModel& m, const std::string& key, const std::string& path) {
  if (!m.forms.count(key)) {
    std::string known;
    for (const auto& f : m.forms) known += (known.empty() ? "" : ", ") + f.first;
    throw ScenarioError(path, "model defines no form '" + key + "' (has " + known + ")");
  }
}

std::vector<ChartPoint> points_in(const CheckInput& c, const Box& domain, const std::vector<std::string>& coords) {
  Box b = domain;
  if (c.box) b = box_override(*c.box, at(c.path, "box"), domain, coords);
  return sample_points(b, c.samples, c.seed);
}

std::vector<ChartPoint> model_points(const CheckInput& c) {
  const SpaceModel& m = need_model(c);
  Box b = m.domain;
  if (c.env.box) b = *c.env.box;
  if (c.box) b = box_override(*c.box, at(c.path, "box"), b, m.coords);
  return sample_points(b, c.samples, c.seed);
}

double metric_gap(const MetricField& a, const MetricField& b, const ChartPoint& pt) {
  return (a(pt).values() - b(pt).values()).cwiseAbs().maxCoeff();
}

Residual metric_residual(const MetricField& a, const MetricField& b, const std::vector<ChartPoint>& pts) {
  return max_residual(pts, [&](const ChartPoint& p) { return metric_gap(a, b, p); });
}

/// Christoffel symbols from central differences of the metric values.
double fd_christoffel_gap(const MetricField& g, const ChartPoint& pt, double h = 1e-5) {
  const int n = g.dim();
  std::vector<Eigen::MatrixXd> dg(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> up = pt.coords(), dn = pt.coords();
    up[k] += h;
    dn[k] -= h;
    dg[k] = (g(ChartPoint(up)).values() - g(ChartPoint(dn)).values()) / (2.0 * h);
  }
  const CurvatureAtPoint c = christoffel(g, pt);
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += 0.5 * c.metric_inverse(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        worst = std::max(worst, std::abs(s - c.gamma(k, i, j)));
      }
  return worst;
}

Plan plan_check(const CheckInput& c) {
  const json& s = c.spec;
  const std::string type = text(s, c.path, "type");
  Plan plan;
  plan.type = type;
  plan.path = c.path;
  const std::string& label = c.label;
  const auto row = [&](const std::string& suffix, double tol) {
    plan.rows.push_back({suffix.empty() ? label : label + "." + suffix, tol});
  };
  const std::initializer_list<const char*> common = {"type", "name", "tolerance", "samples", "seed", "box",
                                                     "base", "actions", "model"};
  const auto keys = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> all(common);
    all.insert(all.end(), extra.begin(), extra.end());
    require_object(s, c.path);
    for (const auto& item : s.items())
      if (std::none_of(all.begin(), all.end(), [&](const char* k) { return item.key() == k; }))
        throw ScenarioError(at(c.path, item.key()), "unknown key for check '" + type + "'");
  };

  if (type == "structure_equations") {
    keys({});
    const SpaceModel& m = need_model(c);
    need_form(m, "omega1", c.path);
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, pts] { return std::vector<Measured>{from(structure_equation_residual(m, pts))}; };
  } else if (type == "closed" || type == "closed_4form") {
    keys({"form"});
    const SpaceModel& m = need_model(c);
    const std::string key = text(s, c.path, "form", type == "closed_4form" ? std::optional<std::string>("Omega")
                                                                          : std::optional<std::string>());
    if (m.complex_forms.count(key)) {
      row("", 1e-8);
      auto pts = model_points(c);
      plan.run = [&m, key, pts] {
        return std::vector<Measured>{from(form_residual(exterior_derivative(m.complex_form(key)), pts))};
      };
    } else {
      need_form(m, key, at(c.path, "form"));
      row("", 1e-8);
      auto pts = model_points(c);
      plan.run = [&m, key, pts] {
        return std::vector<Measured>{from(form_residual(exterior_derivative(m.form(key)), pts))};
      };
    }
  } else if (type == "holomorphic_volume") {
    keys({"form"});
    const SpaceModel& m = need_model(c);
    const std::string key = text(s, c.path, "form");
    if (!m.complex_forms.count(key)) throw ScenarioError(at(c.path, "form"), "model defines no complex form '" + key + "'");
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, key, pts] {
      return std::vector<Measured>{from(form_residual(exterior_derivative(m.complex_form(key)), pts))};
    };
  } else if (type == "einstein") {
    keys({"lambda"});
    const SpaceModel& m = need_model(c);
    double lambda;
    if (auto l = maybe_number(s, c.path, "lambda")) lambda = *l;
    else if (m.expected.count("lambda")) lambda = m.expected.at("lambda");
    else throw ScenarioError(at(c.path, "lambda"), "model has no known Einstein constant; give one");
    row("", 1e-7);
    auto pts = model_points(c);
    plan.run = [&m, lambda, pts] {
      std::ostringstream d;
      d << "lambda " << lambda;
      return std::vector<Measured>{from(einstein_residual(m.metric, lambda, pts), d.str())};
    };
  } else if (type == "nijenhuis") {
    keys({"forms"});
    const SpaceModel& m = need_model(c);
    std::vector<std::string> forms{"omega1", "omega2", "omega3"};
    if (s.contains("forms")) {
      forms.clear();
      if (!s.at("forms").is_array()) throw ScenarioError(at(c.path, "forms"), "expected an array of names");
      for (const auto& f : s.at("forms")) {
        if (!f.is_string()) throw ScenarioError(at(c.path, "forms"), "expected form names");
        forms.push_back(f.get<std::string>());
      }
    }
    for (const auto& f : forms) need_form(m, f, at(c.path, "forms"));
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, forms, pts] {
      Residual r;
      for (const auto& f : forms) {
        const EndomorphismField j = acs_from_pair(m.metric, m.form(f));
        r.absorb(max_residual(pts, [&](const ChartPoint& p) { return nijenhuis(j, p); }));
      }
      return std::vector<Measured>{from(r)};
    };
  } else if (type == "balanced") {
    keys({"form", "power"});
    const SpaceModel& m = need_model(c);
    const std::string key = text(s, c.path, "form");
    need_form(m, key, at(c.path, "form"));
    const int power = integer(s, c.path, "power");
    if (power < 1) throw ScenarioError(at(c.path, "power"), "power must be positive");
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, key, power, pts] { return std::vector<Measured>{from(balanced_check(m, key, power, pts))}; };
  } else if (type == "quaternionic") {
    keys({});
    const SpaceModel& m = need_model(c);
    need_form(m, "omega1", c.path);
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, pts] { return std::vector<Measured>{from(quaternionic_residual(m, pts))}; };
  } else if (type == "submersion") {
    keys({});
    const SpaceModel& m = need_model(c);
    const HKData& b = c.env.action ? c.env.action->base : need_base(c);
    row("", 1e-8);
    auto pts = model_points(c);
    plan.run = [&m, &b, pts] { return std::vector<Measured>{from(submersion_residual(m, b, pts))}; };
  } else if (type == "hk_invariants" || type == "potentials") {
    keys({});
    const HKData& b = need_base(c);
    if (type == "potentials" && !b.kappa) throw ScenarioError(c.path, "base has no potentials");
    row("", 1e-8);
    auto pts = points_in(c, b.domain, b.coords);
    const bool inv = type == "hk_invariants";
    plan.run = [&b, inv, pts] {
      return std::vector<Measured>{from(inv ? hk_invariants_residual(b, pts) : potential_residual(b, pts))};
    };
  } else if (type == "moment_map" || type == "lift_invariance") {
    keys({"omega1_coefficient"});
    const SpaceModel& m = need_model(c);
    const LiftedAction& act = need_action(c);
    if (c.env.bundle != BundleModel::N) throw ScenarioError(c.path, "needs an N bundle model");
    auto pts = model_points(c);
    if (type == "lift_invariance") {
      row("", 1e-8);
      plan.run = [&m, &act, pts] { return std::vector<Measured>{from(lift_invariance_residual(act, m, pts))}; };
    } else {
      row("", 1e-8);
      std::optional<ScalarField> coef;
      if (s.contains("omega1_coefficient")) {
        coef = expression(s.at("omega1_coefficient"), at(c.path, "omega1_coefficient"), m.coords);
        row("omega1", 1e-8);
      }
      const int samples = c.samples;
      const std::uint64_t seed = c.seed;
      plan.run = [&m, &act, pts, coef, samples, seed] {
        const MomentMapData mm = moment_map(act, m, samples, seed, std::numeric_limits<double>::infinity());
        std::vector<Measured> out{from(moment_map_residual(mm, act, m, pts))};
        if (coef) {
          out.push_back(from(max_residual(pts, [&](const ChartPoint& p) {
            return std::abs(mm.components[0](p).value() - (*coef)(p).value());
          })));
        }
        return out;
      };
    }
  } else if (type == "reduced_metric") {
    keys({"which", "a", "slice", "lambda", "scalar", "use_base"});
    const std::string which_s = text(s, c.path, "which");
    ReducedMetric which;
    try {
      which = reduced_metric_from_string(which_s);
    } catch (const ArgumentError& e) {
      throw ScenarioError(at(c.path, "which"), e.what());
    }
    ReductionParams params;
    params.a = number(s, c.path, "a", 2.0);
    params.slice = number(s, c.path, "slice", 0.0);
    if (flag(s, c.path, "use_base", false)) params.base = c.env.action ? c.env.action->base : need_base(c);
    const std::optional<double> lambda = maybe_number(s, c.path, "lambda");
    const std::optional<double> scalar = maybe_number(s, c.path, "scalar");
    row("einstein", 1e-7);
    if (scalar) row("scalar", 1e-7);
    const std::optional<json> box = c.box;
    const int samples = c.samples;
    const std::uint64_t seed = c.seed;
    const std::string path = c.path;
    plan.run = [which, params, lambda, scalar, box, samples, seed, path] {
      const QuotientModel q = reduced_metric(which, params);
      Box b = q.domain;
      if (box) b = box_override(*box, at(path, "box"), b, q.coords);
      const auto pts = sample_points(b, samples, seed);
      double l = lambda ? *lambda : 0.0;
      if (!lambda) {
        if (!q.expected.count("lambda")) throw PreconditionError("quotient has no known Einstein constant");
        l = q.expected.at("lambda");
      }
      std::ostringstream d;
      d << "lambda " << l;
      std::vector<Measured> out{from(einstein_residual(q.metric, l, pts), d.str())};
      if (scalar) {
        std::ostringstream ds;
        ds << "scalar " << *scalar;
        out.push_back(from(max_residual(pts, [&](const ChartPoint& p) {
                               return std::abs(curvature(q.metric, p).scalar - *scalar);
                             }),
                           ds.str()));
      }
      return out;
    };
  } else if (type == "level_set") {
    keys({});
    const SpaceModel& m = need_model(c);
    const LiftedAction& act = need_action(c);
    if (act.kind != KillingKind::permuting || act.combined)
      throw ScenarioError(c.path, "level set needs a single permuting action");
    if (c.env.bundle != BundleModel::N) throw ScenarioError(c.path, "needs an N bundle model");
    row("metric", 1e-8);
    row("connection", 1e-8);
    row("two_path", 1e-8);
    std::vector<std::string> coords{"y1"};
    coords.insert(coords.end(), act.base.coords.begin(), act.base.coords.end());
    Box dom = act.base.domain;
    dom.lo.insert(dom.lo.begin(), -1.0);
    dom.hi.insert(dom.hi.begin(), 1.0);
    auto pts = points_in(c, dom, coords);
    plan.run = [&m, &act, pts] {
      const SpaceModel level = level_set_restrict(m, act);
      const double a = act.constants.a;
      const VectorField& x = act.base_field;
      const MetricField path1 = horizontal_part(level.metric, level_set_action(act));
      return std::vector<Measured>{
          from(metric_residual(level.metric, level_set_metric_formula(act.base, x, a), pts)),
          from(form_residual(level.form("xi_X") - level_set_connection_formula(act.base, x, a), pts)),
          from(metric_residual(path1, permuting_reduced_formula(act.base, x, a, true), pts)),
      };
    };
  } else if (type == "hkqk_roundtrip") {
    keys({"a", "x0"});
    const double a = number(s, c.path, "a", 2.0);
    const double x0 = number(s, c.path, "x0", 0.4);
    if (!(a > 0.0)) throw ScenarioError(at(c.path, "a"), "a must be positive");
    for (const char* r : {"frame", "sigma", "metric", "closed", "permuting"}) row(r, 1e-8);
    const int samples = c.samples;
    const std::uint64_t seed = c.seed;
    const std::optional<json> box = c.box;
    const std::string path = c.path;
    plan.run = [a, x0, samples, seed, box, path] {
      const PermutingFibration fib = example1_fibration(a);
      const QuotientFrame frame = quotient_frame(fib, x0);
      const std::vector<std::string> coords{"x", "x1", "x2", "p", "q"};
      const Box b = box ? box_override(*box, at(path, "box"), fib.domain, coords) : fib.domain;
      const auto pts = sample_points(b, samples, seed);
      const std::vector<ChartPoint> qpts = [&] {
        std::vector<ChartPoint> out;
        for (const auto& p : pts) out.emplace_back(std::vector<double>(p.coords().begin() + 1, p.coords().end()));
        return out;
      }();
      const HKReconstruction hk = hkqk_inverse(frame, samples, seed);
      Residual sig, closed, perm;
      for (int i = 0; i < 3; ++i) {
        sig.absorb(form_residual(hk.sigma[i] - pullback(fib.to_base, fib.base.sigma[i]), pts));
        closed.absorb(form_residual(exterior_derivative(hk.sigma[i]), pts));
      }
      const VectorField dx = VectorField::coordinate(0, hk.dim);
      perm.absorb(form_residual(lie_derivative(dx, hk.sigma[0]), pts));
      perm.absorb(form_residual(lie_derivative(dx, hk.sigma[1]) + 2.0 * hk.sigma[2], pts));
      perm.absorb(form_residual(lie_derivative(dx, hk.sigma[2]) - 2.0 * hk.sigma[1], pts));
      return std::vector<Measured>{
          from(frame_residual(frame, qpts)),
          from(sig),
          from(metric_residual(hk.g, pullback(fib.to_base, fib.base.g), pts)),
          from(closed),
          from(perm),
      };
    };
  } else if (type == "holonomy_dim") {
    keys({"expected", "mode", "point", "rank_tolerance"});
    const SpaceModel& m = need_model(c);
    int expected;
    if (s.contains("expected")) expected = integer(s, c.path, "expected");
    else if (m.expected.count("holonomy_dim")) expected = static_cast<int>(m.expected.at("holonomy_dim"));
    else throw ScenarioError(at(c.path, "expected"), "model has no known holonomy dimension; give one");
    const std::string mode = text(s, c.path, "mode", "exact");
    if (mode != "exact" && mode != "at_most") throw ScenarioError(at(c.path, "mode"), "exact or at_most");
    const double rel = number(s, c.path, "rank_tolerance", 1e-8);
    ChartPoint pt = model_points(c).front();
    if (s.contains("point")) {
      const auto v = numbers(s.at("point"), at(c.path, "point"));
      if (static_cast<int>(v.size()) != m.dim) throw ScenarioError(at(c.path, "point"), "wrong dimension");
      pt = ChartPoint(v);
    }
    row("", 0.0);
    plan.run = [&m, expected, mode, rel, pt] {
      const int est = holonomy_dim_estimate(m.metric, pt, rel);
      Measured out;
      out.worst = pt.coords();
      std::ostringstream d;
      d << "estimate " << est << ", expected " << expected;
      if (mode == "exact") {
        out.value = std::abs(est - expected);
      } else {
        out.value = std::max(0, est - expected);
        if (est < expected) d << " (estimate is a lower bound; shortfall recorded as a finding)";
      }
      out.detail = d.str();
      return std::vector<Measured>{out};
    };
  } else if (type == "ode_residual") {
    keys({"source", "models", "draws", "a", "b", "t", "n", "lambda"});
    const std::string source = text(s, c.path, "source", "exponential_draws");
    row("", 1e-10);
    if (source == "exponential_draws") {
      std::vector<BundleModel> models{BundleModel::Q, BundleModel::P, BundleModel::L, BundleModel::N};
      if (s.contains("models")) {
        models.clear();
        if (!s.at("models").is_array()) throw ScenarioError(at(c.path, "models"), "expected an array");
        for (std::size_t i = 0; i < s.at("models").size(); ++i) {
          const json& w = s.at("models")[i];
          if (!w.is_string()) throw ScenarioError(at(at(c.path, "models"), i), "expected Q, P, L or N");
          models.push_back(bundle_from(w.get<std::string>(), at(at(c.path, "models"), i)));
        }
      }
      const int draws = integer(s, c.path, "draws", 100);
      const auto ra = range(s, c.path, "a", {0.2, 3.0});
      const auto rb = range(s, c.path, "b", {0.2, 2.0});
      const auto rt = range(s, c.path, "t", {-1.0, 1.0});
      const auto rn = range(s, c.path, "n", {1.0, 3.0});
      if (!(ra.first > 0.0) || !(rb.first > 0.0)) throw ScenarioError(c.path, "a and b ranges must be positive");
      const std::uint64_t seed = c.seed;
      plan.run = [models, draws, ra, rb, rt, rn, seed] {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ua(ra.first, ra.second), ub(rb.first, rb.second),
            ut(rt.first, rt.second);
        std::uniform_int_distribution<int> un(static_cast<int>(rn.first), static_cast<int>(rn.second));
        Measured out;
        for (int k = 0; k < draws; ++k) {
          const double a = ua(rng), b = ub(rng), t = ut(rng);
          const int n = un(rng);
          for (auto w : models) {
            const double lambda = exponential_einstein_constant(w, n, b);
            for (double r : system_residual(exponential_profiles(a, b), n, lambda, t, w)) {
              if (std::abs(r) > out.value || std::isnan(r)) {
                out.value = std::isnan(r) ? r : std::abs(r);
                out.worst = {a, b, t, static_cast<double>(n)};
                out.detail = "worst at (a, b, t, n) with model " + to_string(w);
              }
            }
          }
        }
        return std::vector<Measured>{out};
      };
    } else if (source == "model") {
      const SpaceModel& m = need_model(c);
      if (!m.profiles) throw ScenarioError(c.path, "model carries no profiles");
      if (!c.env.bundle) throw ScenarioError(c.path, "model is not a bundle");
      double lambda;
      if (auto l = maybe_number(s, c.path, "lambda")) lambda = *l;
      else if (m.expected.count("lambda")) lambda = m.expected.at("lambda");
      else throw ScenarioError(at(c.path, "lambda"), "give the Einstein constant");
      const BundleModel w = *c.env.bundle;
      auto pts = model_points(c);
      plan.run = [&m, w, lambda, pts] {
        Residual r;
        for (const auto& p : pts) {
          double worst = 0.0;
          for (double x : system_residual(*m.profiles, m.n, lambda, p[0], w)) worst = std::max(worst, std::abs(x));
          r.absorb(worst, ChartPoint(std::vector<double>{p[0]}));
        }
        return std::vector<Measured>{from(r, "over t")};
      };
    } else {
      throw ScenarioError(at(c.path, "source"), "exponential_draws or model");
    }
  } else if (type == "calculus") {
    keys({"seeds"});
    const SpaceModel& m = need_model(c);
    std::vector<std::uint64_t> seeds{c.seed};
    if (s.contains("seeds")) {
      seeds.clear();
      for (double v : numbers(s.at("seeds"), at(c.path, "seeds"))) seeds.push_back(static_cast<std::uint64_t>(v));
      if (seeds.empty()) throw ScenarioError(at(c.path, "seeds"), "need at least one seed");
    }
    std::vector<ChartPoint> pts;
    for (auto sd : seeds) {
      CheckInput ci = c;
      ci.seed = sd;
      const auto more = model_points(ci);
      pts.insert(pts.end(), more.begin(), more.end());
    }
    row("d_squared", 1e-8);
    row("leibniz", 1e-8);
    row("bianchi", 1e-7);
    row("compatibility", 1e-8);
    row("fd_christoffel", 1e-6);
    const bool quaternion = c.env.bundle == BundleModel::N;
    if (quaternion) row("quaternion", 1e-8);
    plan.run = [&m, pts, quaternion] {
      std::vector<const KFormField*> low;
      for (const auto& f : m.forms)
        if (f.second.degree() <= 2) low.push_back(&f.second);
      Residual dd, leib;
      for (const auto* f : low) dd.absorb(form_residual(exterior_derivative(exterior_derivative(*f)), pts));
      for (std::size_t i = 0; i + 1 < low.size(); ++i) {
        const KFormField& a = *low[i];
        const KFormField& b = *low[i + 1];
        if (a.degree() + b.degree() + 1 > m.dim) continue;
        const double sign = a.degree() % 2 == 0 ? 1.0 : -1.0;
        leib.absorb(form_residual(exterior_derivative(wedge(a, b)) - wedge(exterior_derivative(a), b) -
                                      sign * wedge(a, exterior_derivative(b)),
                                  pts));
      }
      const Residual bianchi = max_residual(pts, [&](const ChartPoint& p) {
        const CurvatureAtPoint cv = curvature(m.metric, p);
        return std::max(cv.bianchi_residual(), cv.antisymmetry_residual());
      });
      const Residual compat =
          max_residual(pts, [&](const ChartPoint& p) { return metric_compatibility_residual(m.metric, p); });
      const Residual fd = max_residual(pts, [&](const ChartPoint& p) { return fd_christoffel_gap(m.metric, p); });
      std::vector<Measured> out{from(dd), from(leib), from(bianchi), from(compat), from(fd)};
      if (quaternion) out.push_back(from(quaternionic_residual(m, pts)));
      return out;
    };
  } else {
    throw ScenarioError(at(c.path, "type"), "unknown check '" + type + "'");
  }
  return plan;
}

double lookup_tolerance(const std::string& row, const std::string& type, const std::optional<double>& own,
                        const std::map<std::string, double>& doc, const std::map<std::string, double>& cli,
                        double fallback) {
  if (auto it = cli.find(row); it != cli.end()) return it->second;
  if (auto it = cli.find(type); it != cli.end()) return it->second;
  if (own) return *own;
  if (auto it = doc.find(row); it != doc.end()) return it->second;
  if (auto it = doc.find(type); it != doc.end()) return it->second;
  return fallback;
}

std::string format_number(double v) {
  std::ostringstream o;
  o << std::setprecision(3) << std::scientific << v;
  return o.str();
}

}  // namespace

double default_tolerance(const std::string& check_type) {
  static const std::set<std::string> curvature_level = {"einstein", "reduced_metric"};
  return curvature_level.count(check_type) ? 1e-7 : 1e-8;
}

Report run_scenario(const json& doc, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  allow_keys(doc, "", {"name", "description", "base", "model", "actions", "checks", "sampling", "tolerances"});
  Report report;
  report.scenario = text(doc, "", "name");
  report.description = text(doc, "", "description", "");

  Env env;
  if (doc.contains("sampling")) {
    const json& smp = doc.at("sampling");
    allow_keys(smp, "sampling", {"count", "seed", "box"});
    env.samples = integer(smp, "sampling", "count", 20);
    if (smp.contains("seed")) {
      if (!smp.at("seed").is_number_unsigned()) throw ScenarioError("sampling.seed", "expected a non-negative integer");
      env.seed = smp.at("seed").get<std::uint64_t>();
    }
  }
  if (options.seed) env.seed = *options.seed;
  if (options.samples) env.samples = *options.samples;
  if (env.samples < 1) throw ScenarioError("sampling.count", "need at least one sample");
  report.seed = env.seed;
  report.samples = env.samples;

  std::map<std::string, double> doc_tol;
  if (doc.contains("tolerances")) {
    require_object(doc.at("tolerances"), "tolerances");
    for (const auto& item : doc.at("tolerances").items()) {
      if (!item.value().is_number() || !(item.value().get<double>() >= 0.0))
        throw ScenarioError(at("tolerances", item.key()), "expected a non-negative number");
      doc_tol[item.key()] = item.value().get<double>();
    }
  }

  if (doc.contains("base")) env.base = build_base(doc.at("base"), "base");
  if (doc.contains("actions")) {
    if (!env.base) throw ScenarioError("actions", "actions need a base");
    env.action = build_actions(doc.at("actions"), "actions", *env.base);
  }
  if (doc.contains("model")) {
    const json& m = doc.at("model");
    if (!(m.is_object() && m.value("type", "") == "none")) env.model = build_model(m, "model", env);
  }
  if (doc.contains("sampling") && doc.at("sampling").contains("box")) {
    if (!env.model) throw ScenarioError("sampling.box", "a sampling box needs a model");
    env.box = box_override(doc.at("sampling").at("box"), "sampling.box", env.model->domain, env.model->coords);
  }

  if (!doc.contains("checks") || !doc.at("checks").is_array() || doc.at("checks").empty())
    throw ScenarioError("checks", "expected a non-empty array");
  std::vector<Plan> plans;
  std::set<std::string> names;
  std::list<Env> local_envs;
  const json& checks = doc.at("checks");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string path = at("checks", i);
    require_object(checks[i], path);
    const std::string type = text(checks[i], path, "type");
    const Env* check_env = &env;
    if (checks[i].contains("base") || checks[i].contains("actions") || checks[i].contains("model")) {
      Env& e = local_envs.emplace_back(env);
      e.box.reset();
      e.bundle.reset();
      if (checks[i].contains("base")) {
        e.base = build_base(checks[i].at("base"), at(path, "base"));
        e.action.reset();
      }
      if (checks[i].contains("actions")) {
        if (!e.base) throw ScenarioError(at(path, "actions"), "actions need a base");
        e.action = build_actions(checks[i].at("actions"), at(path, "actions"), *e.base);
      } else if (checks[i].contains("base") && doc.contains("actions")) {
        e.action = build_actions(doc.at("actions"), "actions", *e.base);
      }
      const json* model = checks[i].contains("model") ? &checks[i].at("model")
                          : doc.contains("model")     ? &doc.at("model")
                                                      : nullptr;
      e.model.reset();
      if (model && !(model->is_object() && model->value("type", "") == "none"))
        e.model = build_model(*model, checks[i].contains("model") ? at(path, "model") : "model", e);
      check_env = &e;
    }
    CheckInput ci{checks[i], path, text(checks[i], path, "name", type), *check_env,
                  integer(checks[i], path, "samples", env.samples), env.seed, std::nullopt};
    if (checks[i].contains("seed")) ci.seed = static_cast<std::uint64_t>(integer(checks[i], path, "seed"));
    if (checks[i].contains("box")) ci.box = checks[i].at("box");
    if (ci.samples < 1) throw ScenarioError(at(path, "samples"), "need at least one sample");
    Plan p = plan_check(ci);
    p.own_tolerance = maybe_number(checks[i], path, "tolerance");
    for (const auto& r : p.rows)
      if (!names.insert(r.name).second) throw ScenarioError(path, "duplicate row name '" + r.name + "'; set \"name\"");
    plans.push_back(std::move(p));
  }

  for (const Plan& p : plans) {
    std::vector<Measured> measured;
    std::string error;
    try {
      measured = p.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (std::size_t k = 0; k < p.rows.size(); ++k) {
      CheckRow row;
      row.name = p.rows[k].name;
      row.check = p.type;
      row.tolerance = lookup_tolerance(row.name, p.type, p.own_tolerance, doc_tol, options.tolerances,
                                       p.rows[k].default_tolerance);
      if (!error.empty()) {
        row.status = "error";
        row.max_residual = std::numeric_limits<double>::quiet_NaN();
        row.detail = error;
      } else {
        row.max_residual = measured[k].value;
        row.worst_point = measured[k].worst;
        row.detail = measured[k].detail;
        row.status = row.max_residual <= row.tolerance ? "pass" : "fail";
      }
      report.all_passed = report.all_passed && row.status == "pass";
      report.checks.push_back(std::move(row));
    }
  }
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Report run_scenario_file(const std::filesystem::path& path, const RunOptions& options) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string body = buffer.str();
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < body.size(); ++i) {
      if (body[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ScenarioError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col), e.what());
  }
  return run_scenario(doc, options);
}

nlohmann::json report_to_json(const Report& report, bool include_timing) {
  json rows = json::array();
  for (const auto& r : report.checks) {
    json row = {{"name", r.name},
                {"check", r.check},
                {"status", r.status},
                {"max_residual", std::isfinite(r.max_residual) ? json(r.max_residual) : json(nullptr)},
                {"tolerance", r.tolerance},
                {"worst_point", r.worst_point}};
    if (!r.detail.empty()) row["detail"] = r.detail;
    rows.push_back(row);
  }
  json out = {{"scenario", report.scenario},
              {"seed", report.seed},
              {"samples", report.samples},
              {"checks", rows},
              {"all_passed", report.all_passed}};
  if (include_timing) out["timing"] = {{"elapsed_ms", report.elapsed_ms}};
  return out;
}

std::string format_table(const Report& report) {
  std::size_t w = 5;
  for (const auto& r : report.checks) w = std::max(w, r.name.size());
  std::ostringstream o;
  o << "scenario " << report.scenario << "  (seed " << report.seed << ", samples " << report.samples << ")\n";
  o << std::left << std::setw(static_cast<int>(w) + 2) << "check" << std::setw(8) << "status" << std::setw(12)
    << "residual" << std::setw(12) << "tolerance" << "detail\n";
  for (const auto& r : report.checks) {
    o << std::left << std::setw(static_cast<int>(w) + 2) << r.name << std::setw(8) << r.status << std::setw(12)
      << (std::isfinite(r.max_residual) ? format_number(r.max_residual) : std::string("-")) << std::setw(12)
      << format_number(r.tolerance) << r.detail << "\n";
  }
  o << (report.all_passed ? "all checks passed" : "some checks did not pass") << "\n";
  return o.str();
}

std::vector<std::string> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path, const std::filesystem::path& dir) {
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::is_regular_file(p)) return p;
  const std::filesystem::path bundled = dir / (name_or_path + ".json");
  if (std::filesystem::is_regular_file(bundled)) return bundled;
  throw ScenarioError(name_or_path, "no such scenario file or bundled scenario");
}

}  // namespace qklab
