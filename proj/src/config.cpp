#include "qpkam/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qpkam {

namespace {

using nlohmann::json;

class Violations {
 public:
  void add(const std::string& path, const std::string& what) {
    items_.push_back(path + ": " + what);
  }
  bool empty() const { return items_.empty(); }
  std::string joined() const {
    std::string s;
    for (const std::string& v : items_) {
      if (!s.empty()) s += "; ";
      s += v;
    }
    return s;
  }

 private:
  std::vector<std::string> items_;
};

double get_num(const json& j, const char* key, double fallback, bool required,
               const std::string& path, Violations& v) {
  if (!j.contains(key)) {
    if (required) v.add(path + "." + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_number()) {
    v.add(path + "." + key, "must be a number");
    return fallback;
  }
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback, bool required, const std::string& path,
            Violations& v) {
  if (!j.contains(key)) {
    if (required) v.add(path + "." + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_number_integer()) {
    v.add(path + "." + key, "must be an integer");
    return fallback;
  }
  return j[key].get<int>();
}

// Series spec for a factor: {"cos": k}, {"sin": k} or {"modes": [...]}. k is
// a vector for site factors and a 1-entry vector (or plain int) for kernels.
FourierSeries parse_factor_series(const json& j, int dim, const std::string& path,
                                  Violations& v) {
  auto mode_from_json = [&](const json& jk, const char* what) {
    std::vector<int> comps;
    if (jk.is_number_integer()) {
      comps.push_back(jk.get<int>());
    } else if (jk.is_array()) {
      for (const json& e : jk) {
        if (!e.is_number_integer()) {
          v.add(path, std::string(what) + " entries must be integers");
          return std::vector<int>{};
        }
        comps.push_back(e.get<int>());
      }
    } else {
      v.add(path, std::string(what) + " must be an integer vector");
    }
    if (!comps.empty() && comps.size() != static_cast<std::size_t>(dim)) {
      v.add(path, std::string(what) + " must have " + std::to_string(dim) + " entries");
      return std::vector<int>{};
    }
    return comps;
  };

  if (j.contains("cos") || j.contains("sin")) {
    const bool is_cos = j.contains("cos");
    std::vector<int> k = mode_from_json(j[is_cos ? "cos" : "sin"], is_cos ? "cos" : "sin");
    if (k.empty()) return FourierSeries(dim, 0);
    int cut = 0;
    for (int ki : k) cut = std::max(cut, std::abs(ki));
    if (cut == 0) {
      v.add(path, "cos/sin mode must be nonzero");
      return FourierSeries(dim, 0);
    }
    FourierSeries f(dim, cut);
    Mode kp = make_mode(std::span<const int>(k));
    Mode km{};
    for (int i = 0; i < dim; ++i) km[i] = -kp[i];
    if (is_cos) {
      f.set_coeff(kp, Complex(0.5, 0.0));
      f.set_coeff(km, Complex(0.5, 0.0));
    } else {
      f.set_coeff(kp, Complex(0.0, -0.5));
      f.set_coeff(km, Complex(0.0, 0.5));
    }
    return f;
  }

  if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty()) {
    v.add(path, "factor needs cos, sin or a nonempty modes array");
    return FourierSeries(dim, 0);
  }
  int cut = 0;
  std::vector<std::pair<Mode, Complex>> parsed;
  for (const json& jm : j["modes"]) {
    if (!jm.contains("k")) {
      v.add(path, "mode entry needs k");
      continue;
    }
    std::vector<int> k = mode_from_json(jm["k"], "k");
    if (k.empty()) continue;
    for (int ki : k) cut = std::max(cut, std::abs(ki));
    const double re = jm.value("re", 0.0);
    const double im = jm.value("im", 0.0);
    parsed.emplace_back(make_mode(std::span<const int>(k)), Complex(re, im));
  }
  FourierSeries f(dim, std::max(cut, 0));
  for (const auto& [k, c] : parsed) f.add_coeff(k, c);
  if (f.hermitian_defect() > 1e-12 * std::max(1.0, f.max_abs_coeff())) {
    v.add(path, "mode table must be Hermitian (real-valued function)");
  }
  return f;
}

Factor parse_factor(const json& j, int dim, const std::string& path, Violations& v) {
  Factor fac;
  if (j.contains("sites")) {
    fac.kind = Factor::Kind::Difference;
    if (!j["sites"].is_array() || j["sites"].size() != 2) {
      v.add(path + ".sites", "must be a pair [a, b]");
    } else {
      fac.site_a = j["sites"][0].get<int>();
      fac.site_b = j["sites"][1].get<int>();
    }
    if (!j.contains("direction") || !j["direction"].is_array()) {
      v.add(path + ".direction", "difference kernel needs a lattice direction");
    } else {
      for (const json& e : j["direction"]) fac.direction.push_back(e.get<int>());
    }
    fac.series = parse_factor_series(j, 1, path, v);
  } else {
    fac.kind = Factor::Kind::Site;
    fac.site = get_int(j, "site", 0, true, path, v);
    fac.series = parse_factor_series(j, dim, path, v);
  }
  return fac;
}

Interaction parse_interaction(const json& j, int dim, const std::string& path, Violations& v) {
  Interaction inter;
  inter.range = get_int(j, "L", 0, true, path, v);
  inter.twist = get_num(j, "twist", 0.0, false, path, v);
  if (j.contains("M")) inter.bound_M = get_num(j, "M", 0.0, false, path, v);
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) {
      v.add(path + ".terms", "must be an array");
    } else {
      int t = 0;
      for (const json& jt : j["terms"]) {
        InteractionTerm term;
        term.coeff = get_num(jt, "coeff", 1.0, false, path + ".terms", v);
        const std::string tpath = path + ".terms[" + std::to_string(t) + "]";
        if (!jt.contains("factors") || !jt["factors"].is_array() || jt["factors"].empty()) {
          v.add(tpath, "term needs a nonempty factors array");
        } else {
          int f = 0;
          for (const json& jf : jt["factors"]) {
            term.factors.push_back(
                parse_factor(jf, dim, tpath + ".factors[" + std::to_string(f) + "]", v));
            ++f;
          }
        }
        inter.terms.push_back(std::move(term));
        ++t;
      }
    }
  }
  return inter;
}

RunConfig parse_config_json(const json& root) {
  Violations v;
  RunConfig cfg;

  if (!root.contains("frequency") || !root["frequency"].is_object()) {
    v.add("frequency", "missing block");
  } else {
    const json& jf = root["frequency"];
    if (!jf.contains("alpha") || !jf["alpha"].is_array() || jf["alpha"].empty()) {
      v.add("frequency.alpha", "needs a nonempty array");
    } else {
      for (const json& e : jf["alpha"]) cfg.frequency.alpha.push_back(e.get<double>());
      for (double a : cfg.frequency.alpha) {
        if (a < 0.0 || a > 1.0) v.add("frequency.alpha", "components must lie in [0, 1]");
      }
    }
    cfg.frequency.omega = get_num(jf, "omega", 0.0, true, "frequency", v);
    cfg.frequency.tau = get_num(jf, "tau", 0.0, true, "frequency", v);
    if (cfg.frequency.tau <= 0.0) v.add("frequency.tau", "must be > 0");
    cfg.frequency.tau0 = get_num(jf, "tau0", 0.0, false, "frequency", v);
    cfg.frequency.kmax = get_int(jf, "kmax", 0, false, "frequency", v);
  }

  if (!root.contains("gevrey") || !root["gevrey"].is_object()) {
    v.add("gevrey", "missing block");
  } else {
    const json& jg = root["gevrey"];
    cfg.gevrey.beta = get_num(jg, "beta", 0.0, true, "gevrey", v);
    if (cfg.gevrey.beta < 1.0) v.add("gevrey.beta", "beta must be >= 1");
    cfg.gevrey.r0 = get_num(jg, "R0", 0.0, true, "gevrey", v);
    if (cfg.gevrey.r0 <= 0.0) v.add("gevrey.R0", "must be > 0");
    cfg.gevrey.iota = get_num(jg, "iota", 0.0, true, "gevrey", v);
    if (cfg.gevrey.iota <= 0.0) v.add("gevrey.iota", "must be > 0");
  }

  if (!root.contains("truncation") || !root["truncation"].is_object()) {
    v.add("truncation", "missing block");
  } else {
    const json& jt = root["truncation"];
    cfg.truncation.cutoff = get_int(jt, "K", 0, true, "truncation", v);
    if (cfg.truncation.cutoff < 1) v.add("truncation.K", "must be >= 1");
    cfg.truncation.padding = get_int(jt, "padding", 2, false, "truncation", v);
    if (cfg.truncation.padding < 2) v.add("truncation.padding", "must be >= 2");
    Tolerances& tol = cfg.truncation.tol;
    tol.drop_rel = get_num(jt, "drop_tol", tol.drop_rel, false, "truncation", v);
    tol.divisor_floor = get_num(jt, "divisor_floor", tol.divisor_floor, false, "truncation", v);
    tol.reciprocal_floor =
        get_num(jt, "reciprocal_floor", tol.reciprocal_floor, false, "truncation", v);
    tol.neumann_tol = get_num(jt, "neumann_tol", tol.neumann_tol, false, "truncation", v);
    tol.neumann_max_terms =
        get_int(jt, "neumann_max_terms", tol.neumann_max_terms, false, "truncation", v);
    tol.zero_average_tol =
        get_num(jt, "zero_average_tol", tol.zero_average_tol, false, "truncation", v);
    tol.c_floor = get_num(jt, "c_floor", tol.c_floor, false, "truncation", v);
  }

  const int dim = static_cast<int>(cfg.frequency.alpha.size());
  if (!root.contains("model") || !root["model"].is_object()) {
    v.add("model", "missing block");
  } else {
    const json& jm = root["model"];
    cfg.allow_degenerate_twist = jm.value("allow_degenerate_twist", false);
    if (!jm.contains("interactions") || !jm["interactions"].is_array() ||
        jm["interactions"].empty()) {
      v.add("model.interactions", "needs a nonempty array");
    } else if (dim > 0) {
      int i = 0;
      for (const json& ji : jm["interactions"]) {
        cfg.interactions.push_back(
            parse_interaction(ji, dim, "model.interactions[" + std::to_string(i) + "]", v));
        ++i;
      }
    }
    int twisted_range1 = 0;
    for (const Interaction& inter : cfg.interactions) {
      if (inter.range == 1 && inter.twist != 0.0) ++twisted_range1;
    }
    if (twisted_range1 != 1 && !cfg.allow_degenerate_twist) {
      v.add("model.interactions",
            "exactly one range-1 interaction with a nonzero twist is required for the H4 "
            "invertibility; set model.allow_degenerate_twist to override");
    }
  }

  if (root.contains("schedule")) {
    const json& js = root["schedule"];
    cfg.schedule.max_iterations =
        get_int(js, "max_iterations", cfg.schedule.max_iterations, false, "schedule", v);
    if (cfg.schedule.max_iterations < 1) v.add("schedule.max_iterations", "must be >= 1");
    cfg.schedule.epsilon_floor =
        get_num(js, "epsilon_floor", cfg.schedule.epsilon_floor, false, "schedule", v);
    cfg.schedule.tail_floor_factor =
        get_num(js, "tail_floor_factor", cfg.schedule.tail_floor_factor, false, "schedule", v);
    cfg.schedule.ignore_hypotheses = js.value("ignore_hypotheses", false);
  }

  if (root.contains("verify")) {
    const json& jv = root["verify"];
    if (jv.contains("phis") && jv["phis"].is_array()) {
      cfg.verify.phis.clear();
      for (const json& e : jv["phis"]) cfg.verify.phis.push_back(e.get<double>());
    }
    cfg.verify.reseed_trials =
        get_int(jv, "reseed_trials", cfg.verify.reseed_trials, false, "verify", v);
    cfg.verify.probe_scale = get_num(jv, "probe_scale", cfg.verify.probe_scale, false, "verify", v);
    cfg.verify.probe_tolerance =
        get_num(jv, "probe_tolerance", cfg.verify.probe_tolerance, false, "verify", v);
    cfg.verify.seed = static_cast<std::uint64_t>(
        get_num(jv, "seed", static_cast<double>(cfg.verify.seed), false, "verify", v));
  }

  if (root.contains("sweep")) {
    const json& js = root["sweep"];
    SweepConfig sweep;
    sweep.parameter = js.value("parameter", "");
    if (sweep.parameter != "amplitude" && sweep.parameter != "omega") {
      v.add("sweep.parameter", "must be \"amplitude\" or \"omega\"");
    }
    sweep.interaction_index = get_int(js, "interaction_index", 0, false, "sweep", v);
    if (js.contains("values") && js["values"].is_array()) {
      for (const json& e : js["values"]) sweep.values.push_back(e.get<double>());
    }
    if (sweep.values.empty()) v.add("sweep.values", "needs a nonempty array");
    if (sweep.parameter == "amplitude" &&
        (sweep.interaction_index < 0 ||
         sweep.interaction_index >= static_cast<int>(cfg.interactions.size()))) {
      v.add("sweep.interaction_index", "outside the interaction list");
    }
    cfg.sweep = std::move(sweep);
  }

  if (root.contains("output") && root["output"].is_object()) {
    cfg.output_dir = root["output"].value("dir", cfg.output_dir);
  }

  if (!v.empty()) throw Error(ErrorCode::ValidationError, v.joined());
  return cfg;
}

}  // namespace

Model RunConfig::make_model() const {
  Frequency freq;
  freq.alpha = frequency.alpha;
  freq.omega = frequency.omega;
  freq.tau = frequency.tau;
  freq.tau0 = frequency.tau0;
  freq.kmax = frequency.kmax > 0 ? frequency.kmax : 2 * truncation.cutoff;
  freq.estimate();

  GevreyParams g{gevrey.beta, gevrey.r0, gevrey.iota};
  return Model(interactions, std::move(freq), g, truncation.cutoff, truncation.padding,
               truncation.tol);
}

StepSchedule RunConfig::make_schedule() const {
  StepSchedule s;
  s.r0 = gevrey.r0;
  s.max_iterations = schedule.max_iterations;
  s.epsilon_floor = schedule.epsilon_floor;
  s.tail_floor_factor = schedule.tail_floor_factor;
  return s;
}

RunConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_config_json(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace qpkam
