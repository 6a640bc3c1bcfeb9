#include "cfl/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfl/acceptance.hpp"
#include "cfl/clifford.hpp"
#include "cfl/singular.hpp"
#include "cfl/specfun.hpp"
#include "cfl/spinstruct.hpp"
#include "cfl/tangentcone.hpp"
#include "cfl/topo.hpp"
#include "cfl/util.hpp"
#include "json.hpp"

namespace cfl::cli {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_value(const std::string& raw, TomlValue& out, std::string* error) {
  std::string v = trim(raw);
  if (v.empty()) {
    *error = "empty value";
    return false;
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      *error = "unterminated string";
      return false;
    }
    out.kind = TomlValue::Kind::String;
    out.str = v.substr(1, v.size() - 2);
    return true;
  }
  if (v == "true" || v == "false") {
    out.kind = TomlValue::Kind::Boolean;
    out.boolean = (v == "true");
    return true;
  }
  if (v.front() == '[') {
    if (v.back() != ']') {
      *error = "unterminated array";
      return false;
    }
    out.kind = TomlValue::Kind::Array;
    std::string body = v.substr(1, v.size() - 2);
    size_t pos = 0;
    int depth = 0;
    std::string cur;
    auto flush = [&]() -> bool {
      std::string item = trim(cur);
      cur.clear();
      if (item.empty()) return true;
      TomlValue tv;
      if (!parse_value(item, tv, error)) return false;
      out.array.push_back(tv);
      return true;
    };
    for (; pos < body.size(); ++pos) {
      char c = body[pos];
      if (c == '[') depth++;
      if (c == ']') depth--;
      if (c == ',' && depth == 0) {
        if (!flush()) return false;
      } else {
        cur.push_back(c);
      }
    }
    if (!flush()) return false;
    return true;
  }
  char* end = nullptr;
  double num = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    *error = "cannot parse value: " + v;
    return false;
  }
  out.kind = TomlValue::Kind::Number;
  out.num = num;
  return true;
}

}  // namespace

std::optional<Params> parse_toml(const std::string& text, std::string* error) {
  Params out;
  std::string table;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = std::string::npos;
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        hash = i;
        break;
      }
    }
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        if (error) *error = "line " + std::to_string(lineno) + ": bad table header";
        return std::nullopt;
      }
      table = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      if (error) *error = "line " + std::to_string(lineno) + ": expected key = value";
      return std::nullopt;
    }
    std::string key = trim(t.substr(0, eq));
    TomlValue value;
    std::string verr;
    if (key.empty() || !parse_value(t.substr(eq + 1), value, &verr)) {
      if (error) *error = "line " + std::to_string(lineno) + ": " + (key.empty() ? "empty key" : verr);
      return std::nullopt;
    }
    out[table.empty() ? key : table + "." + key] = value;
  }
  return out;
}

double ScenarioContext::num(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it != params.end() && it->second.kind == TomlValue::Kind::Number ? it->second.num : fallback;
}

std::string ScenarioContext::str(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it != params.end() && it->second.kind == TomlValue::Kind::String ? it->second.str : fallback;
}

std::vector<double> ScenarioContext::num_array(const std::string& key,
                                               std::vector<double> fallback) const {
  auto it = params.find(key);
  if (it == params.end() || it->second.kind != TomlValue::Kind::Array) return fallback;
  std::vector<double> out;
  for (const auto& v : it->second.array)
    if (v.kind == TomlValue::Kind::Number) out.push_back(v.num);
  return out;
}

void ScenarioContext::check(const std::string& name, bool ok) {
  checks.push_back({name, ok});
  if (log) (*log) << (ok ? "  [ok]   " : "  [FAIL] ") << name << "\n";
}

void ScenarioContext::artifact(const std::string& filename, const std::string& content) {
  std::filesystem::create_directories(outdir);
  std::string path = outdir + "/" + filename;
  if (util::write_text(path, content)) artifacts.push_back(path);
}

bool ScenarioContext::all_ok() const {
  for (const auto& c : checks)
    if (!c.second) return false;
  return true;
}

std::string operator_json(const Matrix& m, double rank_tol) {
  nlohmann::json j;
  j["dims"] = {m.rows(), m.cols()};
  j["tolerances"] = {{"rank_tol", rank_tol}, {"herm_tol", kHermTol}};
  std::vector<std::array<double, 2>> rows;
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) rows.push_back({m(i, k).real(), m(i, k).imag()});
  j["entries_row_major"] = rows;
  return j.dump(2);
}

std::string system_json(const builders::SampledSystem& sys) {
  nlohmann::json j;
  j["hilbert_dim"] = sys.hilbert.dim;
  j["signature"] = {sys.signature.p, sys.signature.q};
  j["total_measure"] = sys.total_measure;
  j["has_provider"] = (sys.provider != nullptr);
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& s : sys.samples) {
    nlohmann::json p;
    p["coords"] = std::vector<double>(s.coords.data(), s.coords.data() + s.coords.size());
    p["weight"] = s.weight;
    if (s.point) {
      std::vector<std::array<double, 2>> rows;
      const Matrix& m = s.point->matrix();
      for (int i = 0; i < m.rows(); ++i)
        for (int k = 0; k < m.cols(); ++k) rows.push_back({m(i, k).real(), m(i, k).imag()});
      p["matrix_row_major"] = rows;
    }
    pts.push_back(p);
  }
  j["points"] = pts;
  return j.dump();
}

// ---------------------------------------------------------------------------
// scenario implementations
// ---------------------------------------------------------------------------

namespace {

using namespace cfl::tangentcone;
namespace sg = cfl::singular;

Scenario make_sphere() {
  Scenario s;
  s.name = "sphere";
  s.description = "Dirac sphere: operator eigenvalues, traces, causal samples";
  s.param_specs = {{"params.subdivisions", TomlValue::Kind::Number},
                   {"params.kind", TomlValue::Kind::String},
                   {"params.tau_plus", TomlValue::Kind::Number},
                   {"params.tau_minus", TomlValue::Kind::Number}};
  s.default_ops = {"build", "eigen-report", "causal-samples"};
  s.ops["build"] = [](ScenarioContext&) {};
  s.ops["eigen-report"] = [](ScenarioContext& ctx) {
    builders::SphereParams par;
    par.subdivisions = (int)ctx.num("params.subdivisions", 2);
    std::string kind = ctx.str("params.kind", "single");
    par.kind = kind == "disjoint" ? builders::SphereKind::Disjoint
               : kind == "intersecting" ? builders::SphereKind::Intersecting
                                        : builders::SphereKind::Single;
    par.tau_plus = ctx.num("params.tau_plus", 2.0);
    par.tau_minus = ctx.num("params.tau_minus", 1.5);
    builders::SampledSystem sys = builders::build_dirac_sphere(par);
    util::CsvWriter csv({"p1", "p2", "p3", "copy", "weight", "ev1", "ev2", "trace", "trace_sq"});
    bool evals_ok = true;
    for (const auto& smp : sys.samples) {
      const auto& pt = *smp.point;
      double tr = pt.matrix().trace().real();
      double tr2 = (pt.matrix() * pt.matrix()).trace().real();
      csv.row({smp.coords(0), smp.coords(1), smp.coords(2), smp.coords(3), smp.weight,
               pt.eigenvalues()(0), pt.eigenvalues()(1), tr, tr2});
      if (par.kind == builders::SphereKind::Single &&
          (std::abs(pt.eigenvalues()(0) + 1) > 1e-12 || std::abs(pt.eigenvalues()(1) - 3) > 1e-12))
        evals_ok = false;
    }
    ctx.artifact("sphere_eigen.csv", csv.str());
    ctx.artifact("sphere_system.json", system_json(sys));
    if (par.kind == builders::SphereKind::Single) ctx.check("eigenvalues {3,-1}", evals_ok);
  };
  s.ops["causal-samples"] = [](ScenarioContext& ctx) {
    builders::SampledSystem sys = builders::build_dirac_sphere({builders::SphereKind::Single, 2});
    auto gen = util::rng(ctx.seed);
    std::uniform_int_distribution<int> pick(0, (int)sys.samples.size() - 1);
    util::CsvWriter csv({"i", "j", "re_l1", "im_l1", "re_l2", "im_l2", "relation"});
    bool sym_ok = true;
    for (int t = 0; t < 200; ++t) {
      int i = pick(gen), j = pick(gen);
      auto cs = opcore::causal_classify(*sys.samples[i].point, *sys.samples[j].point);
      auto sc = opcore::causal_classify(*sys.samples[j].point, *sys.samples[i].point);
      if (cs.relation != sc.relation) sym_ok = false;
      csv.row_raw(std::to_string(i) + "," + std::to_string(j) + "," +
                  std::to_string(cs.lambdas[0].real()) + "," + std::to_string(cs.lambdas[0].imag()) +
                  "," + std::to_string(cs.lambdas[1].real()) + "," +
                  std::to_string(cs.lambdas[1].imag()) + "," + opcore::relation_name(cs.relation));
    }
    ctx.artifact("sphere_causal.csv", csv.str());
    ctx.check("classification symmetric under swap", sym_ok);
  };
  return s;
}

Scenario make_plane() {
  Scenario s;
  s.name = "plane";
  s.description = "Euclidean plane: discrete idempotence, Bessel closed chain";
  s.param_specs = {{"params.mass", TomlValue::Kind::Number},
                   {"params.m_nodes", TomlValue::Kind::Number},
                   {"params.chain_tol", TomlValue::Kind::Number}};
  s.default_ops = {"discrete-checks", "chain-grid"};
  s.ops["discrete-checks"] = [](ScenarioContext& ctx) {
    double m = ctx.num("params.mass", 1.0);
    int nodes = (int)ctx.num("params.m_nodes", 8);
    bool ok = true;
    util::CsvWriter csv({"x1", "x2", "idem_residual", "trace_re"});
    for (double x : {0.0, 0.5, 1.5})
      for (double y : {0.0, -0.7}) {
        Matrix f = builders::plane_discrete_F(m, nodes, {x, y});
        double resid = (f * f + f).norm();
        csv.row({x, y, resid, f.trace().real()});
        if (resid > 1e-12 || std::abs(f.trace().real() + 2.0) > 1e-12) ok = false;
      }
    ctx.artifact("plane_discrete.csv", csv.str());
    ctx.check("F^2 = -F and tr F = -2", ok);
  };
  s.ops["chain-grid"] = [](ScenarioContext& ctx) {
    double m = ctx.num("params.mass", 1.0);
    double tol = ctx.num("params.chain_tol", 1e-10);
    auto prov = builders::make_plane_provider(m);
    util::CsvWriter csv({"xi1", "xi2", "chain_scalar", "bessel_j0j1"});
    bool ok = true;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        Eigen::Vector2d xi(0.05 + 0.5 * i, 0.04 + 0.49 * j);
        if (m * xi.norm() > 5.0) continue;
        Mat2 chain = prov->eval_P({0, 0}, xi) * prov->eval_P(xi, {0, 0});
        double expct = std::pow(specfun::bessel_j0(m * xi.norm()), 2) +
                       std::pow(specfun::bessel_j1(m * xi.norm()), 2);
        csv.row({xi(0), xi(1), chain(0, 0).real(), expct});
        if ((chain - expct * Mat2::Identity()).norm() > tol) ok = false;
      }
    ctx.artifact("plane_chain.csv", csv.str());
    ctx.check("closed chain = (J0^2+J1^2) id", ok);
    if (ctx.plot_data) ctx.artifact("plane_chain_plot.csv", csv.str());
  };
  return s;
}

Scenario make_minkowski() {
  Scenario s;
  s.name = "minkowski";
  s.description = "2d Minkowski kernel: quadrature vs closed form, basis identities";
  s.param_specs = {{"params.mass", TomlValue::Kind::Number},
                   {"params.epsilon", TomlValue::Kind::Number}};
  s.default_ops = {"kernel-table", "closed-form-check"};
  s.ops["kernel-table"] = [](ScenarioContext& ctx) {
    builders::MinkowskiParams par;
    par.mass = ctx.num("params.mass", 1.0);
    par.epsilon = ctx.num("params.epsilon", 0.1);
    auto prov = builders::make_minkowski_provider(par);
    ctx.artifact("minkowski_kernel.csv",
                 builders::tabulate_provider_csv(*prov, {-1, -1}, {1, 1}, 9));
  };
  s.ops["closed-form-check"] = [](ScenarioContext& ctx) {
    builders::MinkowskiParams par;
    par.mass = ctx.num("params.mass", 1.0);
    par.epsilon = ctx.num("params.epsilon", 0.1);
    builders::MinkowskiProvider prov(par);
    auto gen = util::rng(ctx.seed);
    std::uniform_real_distribution<double> ud(-1, 1);
    bool ok = true;
    util::CsvWriter csv({"dt", "dx", "relerr"});
    for (int t = 0; t < 25; ++t) {
      Eigen::Vector2d xi(ud(gen), ud(gen));
      Mat2 q = prov.eval_P_quadrature(xi), c = prov.eval_P_closed(xi);
      double rel = (q - c).norm() / c.norm();
      csv.row({xi(0), xi(1), rel});
      if (rel > 1e-6) ok = false;
    }
    ctx.artifact("minkowski_closedform.csv", csv.str());
    ctx.check("quadrature vs K0/K1 closed form (1e-6)", ok);
    Eigen::Vector2d nu = prov.eval_nu();
    ctx.check("nu1 < 0 < nu2", nu(0) < 0 && nu(1) > 0);
  };
  return s;
}

Scenario make_chiral() {
  Scenario s;
  s.name = "chiral";
  s.description = "chiral plane: nu values, c0 fit, tangential Clifford section";
  s.param_specs = {{"params.mass", TomlValue::Kind::Number},
                   {"params.tau", TomlValue::Kind::Number}};
  s.default_ops = {"nu-check", "c0-fit", "cone-maximizer"};
  s.ops["nu-check"] = [](ScenarioContext& ctx) {
    double tau = ctx.num("params.tau", 0.5);
    auto prov = builders::make_chiral_provider(ctx.num("params.mass", 1.0), tau);
    Eigen::Vector2d nu = prov->eval_nu();
    ctx.check("nu = -(1 +- tau)^2",
              std::abs(nu(0) + (1 + tau) * (1 + tau)) < 1e-8 &&
                  std::abs(nu(1) + (1 - tau) * (1 - tau)) < 1e-8);
  };
  s.ops["c0-fit"] = [](ScenarioContext& ctx) {
    double m = ctx.num("params.mass", 1.0), tau = ctx.num("params.tau", 0.5);
    auto prov = builders::make_chiral_provider(m, tau);
    spinstruct::DirectionalDerivative d =
        spinstruct::dA(*prov, {FunctionalKind::Chain, FunctionalPart::Full}, {0, 0}, 1e-3);
    double fitted = util::hs_inner(Matrix(mats::sigma2() / std::sqrt(2.0)), d.partials[0]) / std::sqrt(2.0);
    double expected = 2.0 * std::pow(m, 3) * tau * (1 - tau * tau);
    util::CsvWriter csv({"fitted_c0", "reference"});
    csv.row({fitted, expected});
    ctx.artifact("chiral_c0.csv", csv.str());
    ctx.check("c0 within 1 percent", std::abs(fitted - expected) < 0.01 * std::abs(expected));
  };
  s.ops["cone-maximizer"] = [](ScenarioContext& ctx) {
    double m = ctx.num("params.mass", 1.0), tau = ctx.num("params.tau", 0.5);
    auto prov = builders::make_chiral_provider(m, tau);
    builders::SampledSystem sys =
        builders::provider_system_with_polar_grid(prov, {0, 0}, 0.3, 32, 96);
    ConeFunctional f{FunctionalKind::Chain, FunctionalPart::Full};
    ConeMeasureEstimate mu = estimate_cone_measure(sys, 0, f, std::nullopt, circle_cells(16));
    util::CsvWriter csv({"cell", "dir_s1", "dir_s2", "dir_s3", "dir_id", "weight", "delta"});
    for (size_t i = 0; i < mu.weights.size(); ++i) {
      const Matrix& e = mu.directions[i];
      csv.row({(double)mu.cell_index[i], util::hs_inner(Matrix(mats::sigma1()), e) / std::sqrt(2.0),
               util::hs_inner(Matrix(mats::sigma2()), e) / std::sqrt(2.0),
               util::hs_inner(Matrix(mats::sigma3()), e) / std::sqrt(2.0),
               util::hs_inner(Matrix(Matrix::Identity(2, 2)), e) / std::sqrt(2.0), mu.weights[i],
               mu.delta_used[i]});
    }
    ctx.artifact("chiral_cone.csv", csv.str());
    clifford::ExtensionFamily fam = clifford::extension_family_from_signs(spin_signs_at(sys, 0));
    MaximizeResult res = maximize_clifford(mu, fam, 128);
    ctx.check("unique maximizer", res.unique);
    ctx.check("maximizer = span(sigma1, sigma2)",
              clifford::subspace_distance(res.maximizer.basis,
                                          {mats::sigma1(), mats::sigma2()}) < 1e-2);
    spinstruct::DirectionalDerivative d =
        spinstruct::dA(*prov, {FunctionalKind::Chain, FunctionalPart::Full}, {0, 0}, 1e-3);
    spinstruct::SpinStructureMap g = spinstruct::gamma_map(d, res.maximizer);
    ctx.check("gamma bijective with Riemannian metric",
              g.bijective && g.metric_pos == 2 && g.metric_neg == 0);
  };
  return s;
}

Scenario make_cone_measure() {
  Scenario s;
  s.name = "cone-measure";
  s.description = "tangent cone estimate for a configurable system/functional";
  s.param_specs = {{"params.system", TomlValue::Kind::String},
                   {"params.functional", TomlValue::Kind::String},
                   {"params.alpha", TomlValue::Kind::Number},
                   {"params.beta", TomlValue::Kind::Number},
                   {"params.windowed", TomlValue::Kind::Boolean},
                   {"params.rmax", TomlValue::Kind::Number},
                   {"params.cells", TomlValue::Kind::Number}};
  s.default_ops = {"estimate"};
  s.ops["estimate"] = [](ScenarioContext& ctx) {
    std::string system = ctx.str("params.system", "chiral");
    std::shared_ptr<builders::KernelProvider> prov;
    double rmax = ctx.num("params.rmax", system == "minkowski" ? 1.5e-4 : 0.3);
    if (system == "minkowski")
      prov = builders::make_minkowski_provider({1.0, 0.1, 1e-12, builders::MinkowskiMode::ClosedForm});
    else if (system == "plane")
      prov = builders::make_plane_provider(1.0);
    else
      prov = builders::make_chiral_provider(1.0, 0.5);
    builders::SampledSystem sys =
        builders::provider_system_with_polar_grid(prov, {0, 0}, rmax, 24, 64);
    std::string fname = ctx.str("params.functional", system == "minkowski" ? "signdiff" : "chain");
    ConeFunctional f;
    f.kind = fname == "signdiff" ? FunctionalKind::SignDiff
             : fname == "projdiff" ? FunctionalKind::ProjDiff
                                   : FunctionalKind::Chain;
    std::optional<ConeWindow> window;
    bool windowed = system == "minkowski";
    auto itw = ctx.params.find("params.windowed");
    if (itw != ctx.params.end() && itw->second.kind == TomlValue::Kind::Boolean)
      windowed = itw->second.boolean;
    if (windowed) window = ConeWindow{ctx.num("params.alpha", 0.0), ctx.num("params.beta", 1.5)};
    ConeCells cells = system == "minkowski" ? atom_cells() : circle_cells((int)ctx.num("params.cells", 16));
    ConeMeasureEstimate mu = estimate_cone_measure(sys, 0, f, window, cells);
    util::CsvWriter csv({"cell", "weight", "delta", "c_id", "c_g0_or_s3", "c_g1_or_s1", "c_g2_or_s2"});
    for (size_t i = 0; i < mu.weights.size(); ++i) {
      const Matrix& e = mu.directions[i];
      csv.row({(double)mu.cell_index[i], mu.weights[i], mu.delta_used[i],
               util::hs_inner(Matrix(Matrix::Identity(2, 2) / std::sqrt(2.0)), e),
               util::hs_inner(Matrix(mats::sigma3() / std::sqrt(2.0)), e),
               util::hs_inner(Matrix(mats::sigma1() / std::sqrt(2.0)), e),
               util::hs_inner(Matrix(mats::sigma2() / std::sqrt(2.0)), e)});
    }
    ctx.artifact("cone_measure.csv", csv.str());
    ctx.check("estimate normalized", mu.total() <= 1.0 + 1e-9);
  };
  return s;
}

Scenario make_spin_structure() {
  Scenario s;
  s.name = "spin-structure";
  s.description = "Minkowski spin structure: L(phi) law, time direction, augmented dA";
  s.param_specs = {{"params.angles", TomlValue::Kind::Number},
                   {"params.delta", TomlValue::Kind::Number}};
  s.default_ops = {"l-profile", "time-direction", "augmented"};
  s.ops["l-profile"] = [](ScenarioContext& ctx) {
    auto prov =
        builders::make_minkowski_provider({1.0, 0.1, 1e-12, builders::MinkowskiMode::ClosedForm});
    builders::SampledSystem sys =
        builders::provider_system_with_polar_grid(prov, {0, 0}, 1.5e-4, 24, 64);
    ConeFunctional f{FunctionalKind::SignDiff, FunctionalPart::Full};
    ConeMeasureEstimate mu = estimate_cone_measure(sys, 0, f, ConeWindow{0.0, 1.5}, atom_cells());
    clifford::ExtensionFamily fam = clifford::extension_family_from_signs(spin_signs_at(sys, 0));
    Eigen::VectorXi ac = spin_signs_at(sys, 0);
    int n = (int)ctx.num("params.angles", 32);
    util::CsvWriter csv({"phi", "L", "sin2"});
    double sxx = 0, sxy = 0, syy = 0;
    double total = mu.total();
    for (int i = 0; i < n; ++i) {
      double phi = M_PI * i / (n - 1.0);
      RealVector p(1);
      p << phi;
      double l = L_functional(fam.member_basis(p), mu, ac);
      double sn = std::sin(phi) * std::sin(phi) * total;
      csv.row({phi, l, sn});
      sxx += sn * sn;
      sxy += sn * l;
      syy += l * l;
    }
    ctx.artifact("minkowski_L.csv", csv.str());
    double r2 = (sxy * sxy) / (sxx * syy);
    ctx.check("L proportional to sin^2 (R^2 > 0.999)", r2 > 0.999);
  };
  s.ops["time-direction"] = [](ScenarioContext& ctx) {
    auto prov =
        builders::make_minkowski_provider({1.0, 0.1, 1e-12, builders::MinkowskiMode::ClosedForm});
    auto gen = util::rng(ctx.seed + 1);
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    bool ok = true;
    util::CsvWriter csv({"t1", "x1", "t2", "x2", "lhs", "rhs", "relerr"});
    for (int t = 0; t < 50; ++t) {
      Eigen::Vector2d a(ud(gen), ud(gen)), b(ud(gen), ud(gen));
      spinstruct::EClosedFormCheck c = spinstruct::e_closedform_check(*prov, a, b);
      csv.row({a(0), a(1), b(0), b(1), c.lhs, c.rhs, c.relerr});
      if (std::abs(c.lhs) > 1e-14 && c.relerr > 1e-6) ok = false;
    }
    ctx.artifact("minkowski_E.csv", csv.str());
    ctx.check("E closed form identity (50 pairs)", ok);
    double e = spinstruct::E_functional(*prov, {0, 0}, {0.2, 0.3});
    ctx.check("E antisymmetric", e == -spinstruct::E_functional(*prov, {0.2, 0.3}, {0, 0}));
  };
  s.ops["augmented"] = [](ScenarioContext& ctx) {
    auto prov =
        builders::make_minkowski_provider({1.0, 0.1, 1e-12, builders::MinkowskiMode::ClosedForm});
    double delta = ctx.num("params.delta", 0.2);
    spinstruct::DirectionalDerivative d = spinstruct::time_augmented_dA(*prov, {0, 0}, delta, 1e-3);
    Eigen::VectorXi causal(2);
    causal << 1, -1;
    clifford::CliffordSubspace cl =
        clifford::check_clifford({mats::gamma0(), mats::gamma2()}, causal);
    spinstruct::SpinStructureMap g = spinstruct::gamma_map(d, cl);
    ctx.check("augmented dA rank 2", g.bijective);
    ctx.check("induced metric signature (1,1)", g.metric_pos == 1 && g.metric_neg == 1);
    // gamma coefficient export
    util::CsvWriter csv({"tangent", "coef_gamma0", "coef_gamma2"});
    for (int i = 0; i < 2; ++i)
      csv.row({(double)i, g.coefficients(0, i), g.coefficients(1, i)});
    ctx.artifact("minkowski_gamma.csv", csv.str());
  };
  return s;
}

void write_solution_csv(ScenarioContext& ctx, const std::string& name,
                        const sg::RadialSolution& sol) {
  util::CsvWriter csv({"t", "re1", "im1", "re2", "im2", "norm"});
  for (int i = 0; i < sol.grid.size(); ++i)
    csv.row({sol.grid(i), sol.values[i](0).real(), sol.values[i](0).imag(),
             sol.values[i](1).real(), sol.values[i](1).imag(), sol.norm_log(i)});
  ctx.artifact(name, csv.str());
}

Scenario make_neck() {
  Scenario s;
  s.name = "neck";
  s.description = "neck cylinder modes: conservation, Gronwall, epsilon ladder";
  s.param_specs = {{"params.k", TomlValue::Kind::Number},
                   {"params.mass", TomlValue::Kind::Number},
                   {"params.eps_ladder", TomlValue::Kind::Array}};
  s.default_ops = {"integrate"};
  s.ops["integrate"] = [](ScenarioContext& ctx) {
    double k = ctx.num("params.k", 1.0), m = ctx.num("params.mass", 1.0);
    std::vector<double> ladder = ctx.num_array("params.eps_ladder", {0.1, 0.05, 0.025});
    Vector init(2);
    init << 1.0, 0.0;
    std::vector<sg::RadialSolution> sols;
    bool cons = true, gronwall = true;
    for (double e : ladder) {
      sols.push_back(sg::integrate_mode(sg::neck_rhs(k, m, e), -2, 2, init, 1 << 14));
      if (sols.back().max_norm_drift() > 1e-8) cons = false;
      double lhs = (sols.back().values.back() - sols.back().values.front()).norm();
      if (lhs > sg::neck_gronwall_bound(k, m, e, -2, 2, 1.0) + 1e-9) gronwall = false;
    }
    ctx.check("norm drift < 1e-8", cons);
    ctx.check("Gronwall bound respected", gronwall);
    write_solution_csv(ctx, "neck_solution.csv", sols.front());
    util::CsvWriter csv({"eps_hi", "eps_lo", "sup_diff"});
    for (size_t i = 0; i + 1 < sols.size(); ++i)
      csv.row({ladder[i], ladder[i + 1], sg::sup_difference(sols[i], sols[i + 1])});
    ctx.artifact("neck_ladder.csv", csv.str());
  };
  return s;
}

Scenario make_cone_scenario() {
  Scenario s;
  s.name = "cone";
  s.description = "conical surface: explicit solutions, correlation rescaling";
  s.param_specs = {};
  s.default_ops = {"checks"};
  s.ops["checks"] = [](ScenarioContext& ctx) {
    bool resid_ok = true;
    for (int which : {+1, -1, 3}) {
      double k = which == 3 ? 1.5 : 0.5 * which;
      auto rhs = sg::cone_rhs(1.0, k);
      for (double r = 0.05; r <= 5.0; r += 0.05) {
        Vec2 chi = sg::cone_chi(r, which);
        Vec2 want = (rhs(r) * Vector(chi)).head<2>();
        if ((sg::cone_chi_deriv(r, which) - want).norm() > 1e-8 * std::max(1.0, chi.norm()))
          resid_ok = false;
      }
    }
    ctx.check("explicit solution residual < 1e-8", resid_ok);
    ctx.check("F(pi) = -(1/pi) id", std::abs(sg::cone_F_scalar(M_PI) + 1.0 / M_PI) < 1e-12);
    double lim = sg::cone_F_scalar(1e-6) / 1e-6;
    ctx.check("rescaled correlation limit -id", std::abs(lim + 1.0) < 1e-6);
    util::CsvWriter csv({"r", "F_scalar", "F_rescaled"});
    for (double r = 0.05; r <= 6.0; r += 0.05) csv.row({r, sg::cone_F_scalar(r), sg::cone_F_scalar(r) / r});
    ctx.artifact("cone_F.csv", csv.str());
  };
  return s;
}

Scenario make_cone_s1() {
  Scenario s;
  s.name = "cone-s1";
  s.description = "cone x S1: explicit solutions and the limit correlation matrix";
  s.param_specs = {};
  s.default_ops = {"checks"};
  s.ops["checks"] = [](ScenarioContext& ctx) {
    bool resid_ok = true;
    for (int sign : {+1, -1}) {
      auto rhs = sg::cone_s1_rhs(1.0, 0.5 * sign, 1.0);
      for (double r = 0.05; r <= 5.0; r += 0.05) {
        Vec2 chi = sg::cone_s1_chi(r, sign);
        Vec2 want = (rhs(r) * Vector(chi)).head<2>();
        if ((sg::cone_s1_chi_deriv(r, sign) - want).norm() > 1e-8 * std::max(1.0, chi.norm()))
          resid_ok = false;
      }
    }
    ctx.check("explicit solution residual < 1e-8", resid_ok);
    bool lim_ok = true;
    for (double phi : {0.0, 1.0, 2.5, 4.0}) {
      Mat2 f = sg::cone_s1_F(1e-4, phi);
      Eigen::SelfAdjointEigenSolver<Mat2> es(f);
      if (std::abs(std::abs(f(0, 1)) - 4.0) > 1e-5) lim_ok = false;
      if (std::abs(es.eigenvalues()(0) + 9.0) > 1e-4) lim_ok = false;
    }
    ctx.check("limit matrix rank 2 with |offdiag| = 4", lim_ok);
    util::CsvWriter csv({"phi", "re_f01", "im_f01", "f00"});
    for (double phi = 0.0; phi < 2 * M_PI; phi += 0.1) {
      Mat2 f = sg::cone_s1_F(1e-3, phi);
      csv.row({phi, f(0, 1).real(), f(0, 1).imag(), f(0, 0).real()});
    }
    ctx.artifact("cone_s1_limit.csv", csv.str());
  };
  return s;
}

Scenario make_torus_s1() {
  Scenario s;
  s.name = "torus-s1";
  s.description = "Lorentzian torus x S1: conservation and epsilon ladder";
  s.param_specs = {{"params.k", TomlValue::Kind::Number},
                   {"params.l", TomlValue::Kind::Number},
                   {"params.mass", TomlValue::Kind::Number}};
  s.default_ops = {"integrate"};
  s.ops["integrate"] = [](ScenarioContext& ctx) {
    double k = ctx.num("params.k", 0.0), l = ctx.num("params.l", 1.0);
    double m = ctx.num("params.mass", 1.0);
    Vector init(2);
    init << 1.0, 0.0;
    std::vector<double> ladder = {0.1, 0.05, 0.025};
    std::vector<sg::RadialSolution> sols;
    bool cons = true;
    for (double e : ladder) {
      sols.push_back(sg::integrate_mode(sg::torus_s1_rhs(k, l, m, e), -2, 2, init, 1 << 14));
      if (sols.back().max_norm_drift() > 1e-8) cons = false;
    }
    ctx.check("norm drift < 1e-8", cons);
    double d1 = sg::sup_difference(sols[0], sols[1]);
    double d2 = sg::sup_difference(sols[1], sols[2]);
    ctx.check("epsilon ladder Cauchy", d2 < d1);
    write_solution_csv(ctx, "torus_s1_solution.csv", sols.front());
  };
  return s;
}

Scenario make_schwarzschild() {
  Scenario s;
  s.name = "schwarzschild";
  s.description = "Schwarzschild interior: conserved modes, continuity, wave packets";
  s.param_specs = {{"params.bh_mass", TomlValue::Kind::Number},
                   {"params.mass", TomlValue::Kind::Number},
                   {"params.omega0", TomlValue::Kind::Number}};
  s.default_ops = {"modes", "packet"};
  s.ops["modes"] = [](ScenarioContext& ctx) {
    sg::SchwarzschildParams par;
    par.bh_mass = ctx.num("params.bh_mass", 1.0);
    double m = ctx.num("params.mass", 0.1);
    Vector init(2);
    init << 1.0, cplx(0, 0.5);
    init /= init.norm();
    bool cons = true;
    for (double omega : {0.0, 1.0})
      for (int lam : {1, -1})
        for (double kh : {0.5, -0.5}) {
          sg::ModeSpec mode;
          mode.omega = omega;
          mode.lambda_sep = lam;
          mode.k_half = kh;
          mode.m_mass = m;
          sg::RadialSolution sol = sg::schwarzschild_radial(par, mode, 0.01, 1.9, 1 << 14, init);
          if (sol.max_norm_drift() > 1e-6) cons = false;
          if (omega == 1.0 && lam == 1 && kh > 0) write_solution_csv(ctx, "schwarzschild_mode.csv", sol);
        }
    ctx.check("current conservation < 1e-6", cons);
  };
  s.ops["packet"] = [](ScenarioContext& ctx) {
    sg::SchwarzschildParams par;
    par.bh_mass = ctx.num("params.bh_mass", 1.0);
    RealVector times(4);
    times << 0.0, 0.2, 0.4, 0.6;
    sg::PacketResult pr = sg::schwarzschild_packet(par, ctx.num("params.mass", 0.1), 1, 0.5,
                                                   ctx.num("params.omega0", 40.0), 4.0, 81, 1.65,
                                                   0.05, 1.9, times, 3000);
    util::CsvWriter csv({"t", "centroid_u"});
    for (int i = 0; i < times.size(); ++i) csv.row({times(i), pr.centroids(i)});
    ctx.artifact("schwarzschild_packet.csv", csv.str());
    ctx.check("packet centroid slope within 5 percent of 1", std::abs(pr.slope - 1.0) < 0.05);
  };
  return s;
}

Scenario make_lattice() {
  Scenario s;
  s.name = "lattice";
  s.description = "torus lattice: distances, strata, scale scan, M_delta windows";
  s.param_specs = {{"params.kappa_denominator", TomlValue::Kind::Number},
                   {"params.r_list", TomlValue::Kind::Array},
                   {"params.delta_list", TomlValue::Kind::Array}};
  s.default_ops = {"distances", "scan", "m-delta"};
  s.ops["distances"] = [](ScenarioContext& ctx) {
    double kappa = M_PI / ctx.num("params.kappa_denominator", 8.0);
    builders::SampledSystem sys = builders::build_torus_lattice(kappa);
    Matrix f00 = builders::lattice_F({0, 0});
    double d1 = util::hs_dist(f00, builders::lattice_F({M_PI, 0}));
    double d2 = util::hs_dist(f00, builders::lattice_F({M_PI, M_PI}));
    ctx.check("antipodal distances sqrt(24) and 4",
              std::abs(d1 - std::sqrt(24.0)) < 1e-12 && std::abs(d2 - 4.0) < 1e-12);
    topo::OperatorCloud cloud = topo::make_cloud(sys, topo::CloudNorm::HilbertSchmidt);
    bool bound_ok = true;
    for (int i = 0; i < cloud.size(); ++i)
      for (int j = i + 1; j < cloud.size(); ++j) {
        double dx = sys.samples[i].coords(0) - sys.samples[j].coords(0);
        double dy = sys.samples[i].coords(1) - sys.samples[j].coords(1);
        double bound = std::sqrt(24.0) * (std::abs(std::sin(dx / 2)) + std::abs(std::sin(dy / 2)));
        if (cloud.distances(i, j) > bound + 1e-12) bound_ok = false;
      }
    ctx.check("Schwarz distance bound", bound_ok);
    topo::Strata st = topo::strata(cloud);
    ctx.check("single stratum (0,2)",
              st.distinct.size() == 1 && st.distinct[0] == std::make_pair(0, 2));
  };
  s.ops["scan"] = [](ScenarioContext& ctx) {
    double kappa = M_PI / ctx.num("params.kappa_denominator", 8.0);
    builders::SampledSystem sys = builders::build_torus_lattice(kappa);
    topo::OperatorCloud cloud = topo::make_cloud(sys, topo::CloudNorm::HilbertSchmidt);
    std::vector<double> rlist =
        ctx.num_array("params.r_list", {0.30, 0.45, 0.49, 0.7, 1.0, 1.5, 2.45});
    std::vector<topo::ScanRow> rows = topo::scale_scan(cloud, rlist);
    util::CsvWriter csv({"r", "beta0", "beta1", "edges"});
    std::ostringstream regimes;
    for (const auto& row : rows) {
      csv.row({row.r, (double)row.beta0, (double)row.beta1, (double)row.edge_count});
      regimes << row.regime << " ";
    }
    ctx.artifact("lattice_scan.csv", csv.str());
    if (ctx.log) (*ctx.log) << "  regimes: " << regimes.str() << "\n";
    bool has_discrete = false, has_torus_in_window = false, has_blob = false;
    double lo = std::sqrt(24.0) * std::sin(kappa / 2);
    for (const auto& row : rows) {
      if (row.regime == "discrete") has_discrete = true;
      if (row.regime == "torus" && row.r > lo && row.r < 2.0) has_torus_in_window = true;
      if (row.regime == "blob") has_blob = true;
    }
    ctx.check("regimes discrete -> torus(window) -> blob",
              has_discrete && has_torus_in_window && has_blob);
  };
  s.ops["m-delta"] = [](ScenarioContext& ctx) {
    double kappa = M_PI / ctx.num("params.kappa_denominator", 8.0);
    builders::SampledSystem sys = builders::build_torus_lattice(kappa);
    topo::OperatorCloud cloud = topo::make_cloud(sys, topo::CloudNorm::HilbertSchmidt);
    std::vector<double> dlist = ctx.num_array("params.delta_list", {0.025, 0.04, 0.05});
    util::CsvWriter csv({"delta", "beta0", "beta1"});
    bool torus_ok = true;
    for (double delta : dlist) {
      topo::BettiReport b = topo::betti(topo::m_delta_complex(cloud, delta));
      csv.row({delta, (double)b.beta0, (double)b.beta1});
      if (b.beta0 != 1 || b.beta1 != 2) torus_ok = false;
    }
    ctx.artifact("lattice_mdelta.csv", csv.str());
    ctx.check("M_delta torus regime inside the window", torus_ok);
  };
  return s;
}

Scenario make_verify_all() {
  Scenario s;
  s.name = "verify-all";
  s.description = "run the full acceptance suite and emit a pass/fail table";
  s.default_ops = {"run"};
  s.ops["run"] = [](ScenarioContext& ctx) {
    std::ostringstream table;
    auto results = acceptance::run_all(ctx.log);
    util::CsvWriter csv({"id", "passed", "seconds"});
    for (const auto& r : results) {
      csv.row_raw(std::to_string(r.id) + "," + (r.passed ? "1" : "0") + "," +
                  std::to_string(r.seconds));
      ctx.check("criterion " + std::to_string(r.id) + ": " + r.name, r.passed);
    }
    ctx.artifact("acceptance_table.csv", csv.str());
    (void)table;
  };
  return s;
}

}  // namespace

const std::map<std::string, Scenario>& registry() {
  static const std::map<std::string, Scenario> reg = [] {
    std::map<std::string, Scenario> m;
    for (auto&& s : {make_sphere(), make_plane(), make_minkowski(), make_chiral(),
                     make_cone_measure(), make_spin_structure(), make_neck(), make_cone_scenario(),
                     make_cone_s1(), make_torus_s1(), make_schwarzschild(), make_lattice(),
                     make_verify_all()})
      m[s.name] = s;
    return m;
  }();
  return reg;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const auto& [name, sc] : registry()) out.push_back(name + ": " + sc.description);
  return out;
}

int run_scenario(const std::string& name, const std::string& config_path, const std::string& outdir,
                 uint64_t seed, bool plot_data, std::ostream& log) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    log << "unknown scenario: " << name << "\n";
    return 3;
  }
  const Scenario& sc = it->second;

  ScenarioContext ctx;
  ctx.outdir = outdir.empty() ? "." : outdir;
  ctx.seed = seed;
  ctx.plot_data = plot_data;
  ctx.log = &log;

  std::vector<std::string> ops = sc.default_ops;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      log << "cannot open config: " << config_path << "\n";
      return 2;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    std::string err;
    auto parsed = parse_toml(buf.str(), &err);
    if (!parsed) {
      log << "config parse error: " << err << "\n";
      return 2;
    }
    ctx.params = *parsed;
    // validation: scenario name match, known params with matching types, known ops
    auto sit = ctx.params.find("scenario");
    if (sit != ctx.params.end() &&
        (sit->second.kind != TomlValue::Kind::String || sit->second.str != name)) {
      log << "config names a different scenario\n";
      return 3;
    }
    for (const auto& [key, value] : ctx.params) {
      if (key == "scenario" || key == "pipeline.ops") continue;
      if (key.rfind("params.", 0) != 0) continue;
      bool known = false;
      for (const auto& spec : sc.param_specs)
        if (spec.key == key) {
          known = true;
          if (spec.kind != value.kind) {
            log << "parameter type mismatch: " << key << "\n";
            return 3;
          }
        }
      if (!known) {
        log << "unknown parameter: " << key << "\n";
        return 3;
      }
    }
    auto oit = ctx.params.find("pipeline.ops");
    if (oit != ctx.params.end()) {
      if (oit->second.kind != TomlValue::Kind::Array) {
        log << "pipeline.ops must be an array\n";
        return 3;
      }
      ops.clear();
      for (const auto& v : oit->second.array) {
        if (v.kind != TomlValue::Kind::String || !sc.ops.count(v.str)) {
          log << "unknown op in pipeline: " << (v.kind == TomlValue::Kind::String ? v.str : "?")
              << "\n";
          return 3;
        }
        ops.push_back(v.str);
      }
    }
  }

  log << "scenario " << name << "\n";
  try {
    for (const auto& op : ops) sc.ops.at(op)(ctx);
  } catch (const std::invalid_argument& e) {
    log << "parameter validation failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    log << "execution failure: " << e.what() << "\n";
    return 4;
  }
  for (const auto& a : ctx.artifacts) log << "  wrote " << a << "\n";
  return ctx.all_ok() ? 0 : 4;
}

}  // namespace cfl::cli
