#include "qpkam/report.hpp"

#include <cmath>
#include <fstream>

#include "qpkam/hull_io.hpp"

namespace qpkam {

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  return format_g17(v);
}

}  // namespace

void JsonWriter::separator() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!first_in_scope_.empty()) {
    if (!first_in_scope_.back()) out_ += ",";
    first_in_scope_.back() = false;
  }
}

JsonWriter& JsonWriter::begin_object() {
  separator();
  out_ += "{";
  first_in_scope_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  out_ += "}";
  first_in_scope_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separator();
  out_ += "[";
  first_in_scope_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  out_ += "]";
  first_in_scope_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
  separator();
  out_ += "\"" + json_escape(name) + "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separator();
  out_ += render_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::int64_t v) {
  separator();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separator();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
  separator();
  out_ += "\"" + json_escape(v) + "\"";
  return *this;
}

void write_condition_report(JsonWriter& w, const ConditionReport& rep) {
  w.begin_object();
  w.field("n_plus", rep.n_plus);
  w.field("n_minus", rep.n_minus);
  w.field("c", rep.c);
  w.field("T", rep.t_bound);
  w.field("U", rep.u_bound);
  w.field("delta", rep.delta);
  w.field("nu", rep.nu);
  w.field("tau", rep.tau);
  w.field("eps0", rep.eps0);
  w.field("h5a", rep.h5a);
  w.field("h5b", rep.h5b);
  w.field("chi", rep.chi);
  w.field("chi_prime", rep.chi_prime);
  w.field("beta", rep.beta);
  w.field("radius", rep.radius);
  w.field("rbar", rep.rbar);
  w.field("cutoff", rep.cutoff);
  w.field("tail_mass", rep.tail_mass);
  w.field("t_tail", rep.t_tail);
  w.key("interaction_bounds").begin_array();
  for (double m : rep.interaction_bounds) w.value(m);
  w.end_array();
  w.key("bounds_estimated").begin_array();
  for (int e : rep.bounds_estimated) w.value(e != 0);
  w.end_array();
  w.key("hypotheses").begin_array();
  for (const HypothesisCheck& h : rep.hypotheses) {
    w.begin_object();
    w.field("name", h.name);
    w.field("pass", h.pass);
    w.field("margin", h.margin);
    w.field("note", h.note);
    w.end_object();
  }
  w.end_array();
  w.field("evidence", "numerical evidence at the stated truncation; not a rigorous proof");
  w.end_object();
}

void write_solve_result(JsonWriter& w, const SolveResult& result) {
  w.begin_object();
  w.field("converged", result.converged);
  w.field("stop_reason", result.stop_reason);
  w.field("error_message", result.error_message);
  w.field("iterations", result.state.iteration);
  w.field("final_residual", result.state.residual_norm);
  w.field("final_radius", result.state.radius);
  w.field("accumulated_delta_norm", result.state.accumulated_delta_norm);
  w.key("residual_history").begin_array();
  for (double e : result.residual_history) w.value(e);
  w.end_array();
  w.key("steps").begin_array();
  for (const StepDiagnostics& s : result.steps) {
    w.begin_object();
    w.field("iteration", s.iteration);
    w.field("radius_before", s.radius_before);
    w.field("radius_after", s.radius_after);
    w.field("kappa", s.kappa);
    w.field("r_prime", s.r_prime);
    w.field("r_double_prime", s.r_double_prime);
    w.field("r_triple_prime", s.r_triple_prime);
    w.field("r_fourth", s.r_fourth);
    w.field("residual_before", s.residual_before);
    w.field("residual_after", s.residual_after);
    w.field("delta_norm", s.delta_norm);
    w.field("delta_deriv_norm", s.delta_deriv_norm);
    w.field("wbar", s.wbar);
    w.field("mean_l_residual", s.mean_l_residual);
    w.field("neumann_terms", s.neumann_terms);
    w.field("tail_mass", s.tail_mass);
    w.field("inversion_defect", s.inversion_defect);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

void write_verification(JsonWriter& w, const VerificationReport& rep) {
  w.begin_object();
  w.field("base_residual_norm", rep.base_residual_norm);
  w.key("translations").begin_array();
  for (const TranslationCheck& t : rep.translations) {
    w.begin_object();
    w.field("phi", t.phi);
    w.field("residual_norm", t.residual_norm);
    w.field("ratio", t.ratio);
    w.field("pass", t.pass);
    w.end_object();
  }
  w.end_array();
  w.field("zero_average_identity", rep.zero_average_identity);
  w.field("zero_average_pass", rep.zero_average_pass);
  w.key("probes").begin_array();
  for (const ProbeResult& p : rep.probes) {
    w.begin_object();
    w.field("trial", p.trial);
    w.field("converged", p.converged);
    w.field("distance", p.distance);
    w.field("pass", p.pass);
    w.end_object();
  }
  w.end_array();
  w.field("all_pass", rep.all_pass);
  w.end_object();
}

void write_smallness(JsonWriter& w, const SmallnessReport& rep) {
  w.begin_object();
  w.key("entries").begin_array();
  for (const SmallnessEntry& e : rep.entries) {
    w.begin_object();
    w.field("name", e.name);
    w.field("satisfied", e.satisfied);
    w.field("informational", e.informational);
    w.field("value", e.value);
    w.field("threshold", e.threshold);
    w.field("note", e.note);
    w.end_object();
  }
  w.end_array();
  w.field("all_satisfied", rep.all_satisfied);
  w.field("evidence", "heuristic surrogates with a fitted contraction constant");
  w.end_object();
}

std::string residual_history_csv(const SolveResult& result) {
  std::string csv = "iteration,R,eps,delta_norm,neumann_terms,tail_budget\n";
  for (std::size_t i = 0; i < result.residual_history.size(); ++i) {
    const bool has_step = i > 0 && i - 1 < result.steps.size();
    const StepDiagnostics* s = has_step ? &result.steps[i - 1] : nullptr;
    csv += std::to_string(i) + ",";
    csv += format_g17(s != nullptr ? s->radius_after
                                   : (result.steps.empty() ? result.state.radius
                                                           : result.steps.front().radius_before));
    csv += "," + format_g17(result.residual_history[i]);
    csv += "," + format_g17(s != nullptr ? s->delta_norm : 0.0);
    csv += "," + std::to_string(s != nullptr ? s->neumann_terms : 0);
    csv += "," + format_g17(s != nullptr ? s->tail_mass : 0.0);
    csv += "\n";
  }
  return csv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::FormatError, "cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::FormatError, "write failure on " + path);
}

}  // namespace qpkam
