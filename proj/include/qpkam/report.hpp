#ifndef QPKAM_REPORT_HPP
#define QPKAM_REPORT_HPP

#include <string>
#include <vector>

#include "qpkam/certifier.hpp"
#include "qpkam/solver.hpp"

namespace qpkam {

// Minimal streaming JSON emitter with byte-deterministic output: keys appear
// in call order and every float is rendered at 17 significant digits.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(const std::string& v);
  JsonWriter& value(const char* v) { return value(std::string(v)); }

  JsonWriter& field(const std::string& name, double v) { return key(name).value(v); }
  JsonWriter& field(const std::string& name, int v) { return key(name).value(v); }
  JsonWriter& field(const std::string& name, bool v) { return key(name).value(v); }
  JsonWriter& field(const std::string& name, const std::string& v) { return key(name).value(v); }
  JsonWriter& field(const std::string& name, const char* v) { return key(name).value(v); }

  std::string str() const { return out_; }

 private:
  void separator();
  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_key_ = false;
};

void write_condition_report(JsonWriter& w, const ConditionReport& rep);
void write_solve_result(JsonWriter& w, const SolveResult& result);
void write_verification(JsonWriter& w, const VerificationReport& rep);
void write_smallness(JsonWriter& w, const SmallnessReport& rep);

// residual-history CSV: iteration, R_n, eps_n, ||Delta_n||, Neumann terms,
// tail budget.
std::string residual_history_csv(const SolveResult& result);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qpkam

#endif
