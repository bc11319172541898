#include "qpkam/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>

#include "qpkam/hull_io.hpp"
#include "qpkam/report.hpp"

namespace qpkam {

namespace {

namespace fs = std::filesystem;

std::string ensure_out_dir(const RunConfig& config, const RunPaths& paths) {
  const std::string dir = paths.out_dir.empty() ? config.output_dir : paths.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::FormatError, "cannot create output directory " + dir);
  return dir;
}

FourierSeries starting_hull(const Model& model, const std::string& hull_path) {
  if (hull_path.empty()) return model.zero_series();
  HullFile file = load_hull(hull_path);
  if (file.state.h.dim() != model.dim()) {
    throw Error(ErrorCode::FormatError, "hull file dimension does not match the model");
  }
  return file.state.h;
}

struct SolveBundle {
  SolveResult run;
  ConditionReport initial;
  ConditionReport final_rep;
  bool have_final = false;
  bool hypotheses_pass = true;
  bool fit_available = false;
  ConvergenceFit fit;
  VerificationReport verification;
  bool have_verification = false;
  SmallnessReport smallness;
  bool have_smallness = false;
};

SolveBundle solve_pipeline(const RunConfig& config, const Model& model,
                           const FourierSeries& h0) {
  SolveBundle bundle;
  StepSchedule schedule = config.make_schedule();

  bundle.initial = condition_numbers(model, h0, model.gevrey());
  check_hypotheses(bundle.initial, model.tol().c_floor);
  for (const HypothesisCheck& h : bundle.initial.hypotheses) {
    bundle.hypotheses_pass = bundle.hypotheses_pass && h.pass;
  }

  if (!bundle.hypotheses_pass && !config.schedule.ignore_hypotheses) {
    bundle.run.state.h = h0;
    bundle.run.state.radius = schedule.r0;
    bundle.run.state.residual_norm = bundle.initial.eps0;
    bundle.run.residual_history.push_back(bundle.initial.eps0);
    bundle.run.converged = false;
    bundle.run.stop_reason = "HypothesesFailed";
    bundle.run.error_message =
        "H1-H5 do not hold at the starting hull; set schedule.ignore_hypotheses to proceed";
    return bundle;
  }

  bundle.run = solve(model, h0, schedule);

  try {
    bundle.final_rep = condition_numbers(model, bundle.run.state.h, model.gevrey());
    check_hypotheses(bundle.final_rep, model.tol().c_floor);
    bundle.have_final = true;
  } catch (const Error&) {
    bundle.have_final = false;
  }

  try {
    bundle.fit = convergence_fit(bundle.run.residual_history, schedule.epsilon_floor);
    bundle.fit_available = true;
  } catch (const Error&) {
    bundle.fit_available = false;
  }

  if (bundle.run.converged && (!config.verify.phis.empty() || config.verify.reseed_trials > 0)) {
    bundle.verification =
        verify_solution(model, bundle.run.state.h, config.verify.phis,
                        config.verify.reseed_trials, schedule, config.verify.probe_scale,
                        config.verify.probe_tolerance, config.verify.seed);
    bundle.have_verification = true;
  }

  if (bundle.have_final) {
    bundle.smallness =
        smallness_report(bundle.initial, bundle.final_rep, bundle.run, model, schedule);
    bundle.have_smallness = true;
  }
  return bundle;
}

std::string bundle_to_json(const SolveBundle& bundle) {
  JsonWriter w;
  w.begin_object();
  w.field("hypotheses_pass_at_start", bundle.hypotheses_pass);
  w.key("initial_conditions");
  write_condition_report(w, bundle.initial);
  w.key("solve");
  write_solve_result(w, bundle.run);
  if (bundle.have_final) {
    w.key("final_conditions");
    write_condition_report(w, bundle.final_rep);
  }
  if (bundle.fit_available) {
    w.key("convergence_fit").begin_object();
    w.field("slope", bundle.fit.slope);
    w.field("A_fit", bundle.fit.a_fit);
    w.field("quadratic", bundle.fit.quadratic);
    w.field("points_used", bundle.fit.points_used);
    w.end_object();
  }
  if (bundle.have_verification) {
    w.key("verification");
    write_verification(w, bundle.verification);
  }
  if (bundle.have_smallness) {
    w.key("smallness");
    write_smallness(w, bundle.smallness);
  }
  w.end_object();
  return w.str();
}

}  // namespace

std::string solve_to_json(const RunConfig& config, const std::string& hull_path) {
  Model model = config.make_model();
  FourierSeries h0 = starting_hull(model, hull_path);
  return bundle_to_json(solve_pipeline(config, model, h0));
}

int run_solve(const RunConfig& config, const RunPaths& paths) {
  const std::string dir = ensure_out_dir(config, paths);
  Model model = config.make_model();
  FourierSeries h0 = starting_hull(model, paths.hull_path);
  SolveBundle bundle = solve_pipeline(config, model, h0);

  write_text_file(dir + "/run_report.json", bundle_to_json(bundle) + "\n");
  write_text_file(dir + "/residual_history.csv", residual_history_csv(bundle.run));
  save_hull(bundle.run.state, config.gevrey.beta, dir + "/hull.txt");

  if (!paths.quiet) {
    std::cout << "solve: " << bundle.run.stop_reason << " after " << bundle.run.state.iteration
              << " step(s), residual " << format_g17(bundle.run.state.residual_norm) << "\n";
    if (bundle.fit_available) {
      std::cout << "convergence slope " << format_g17(bundle.fit.slope) << " (quadratic: "
                << (bundle.fit.quadratic ? "yes" : "no") << ")\n";
    }
    std::cout << "report: " << dir << "/run_report.json\n";
  }
  return 0;
}

std::string certify_to_json(const RunConfig& config, const std::string& hull_path) {
  Model model = config.make_model();
  FourierSeries hull = starting_hull(model, hull_path);
  ConditionReport rep = condition_numbers(model, hull, model.gevrey());
  check_hypotheses(rep, model.tol().c_floor);

  // Translation-family and weighted-average checks are cheap; probe trials
  // belong to solve-time verification.
  VerificationReport ver = verify_solution(model, hull.with_cutoff(model.cutoff()),
                                           config.verify.phis, 0, config.make_schedule());

  JsonWriter w;
  w.begin_object();
  w.key("conditions");
  write_condition_report(w, rep);
  w.key("verification");
  write_verification(w, ver);
  w.end_object();
  return w.str();
}

int run_certify(const RunConfig& config, const RunPaths& paths) {
  const std::string dir = ensure_out_dir(config, paths);
  const std::string json = certify_to_json(config, paths.hull_path);
  write_text_file(dir + "/certify_report.json", json + "\n");
  if (!paths.quiet) {
    std::cout << "certify: report written to " << dir << "/certify_report.json\n";
  }
  return 0;
}

std::string residual_to_json(const RunConfig& config, const std::string& hull_path) {
  Model model = config.make_model();
  FourierSeries hull = starting_hull(model, hull_path);
  TailStats tail;
  FourierSeries res = residual(model, hull, &tail);
  JsonWriter w;
  w.begin_object();
  w.field("residual_norm", gevrey_norm(res, model.gevrey()));
  w.field("residual_l1", l1_norm(res));
  w.field("tail_mass", tail.dropped_mass);
  w.field("beta", model.gevrey().beta);
  w.field("radius", model.gevrey().radius);
  w.field("cutoff", model.cutoff());
  w.end_object();
  return w.str();
}

int run_residual(const RunConfig& config, const RunPaths& paths) {
  const std::string dir = ensure_out_dir(config, paths);
  const std::string json = residual_to_json(config, paths.hull_path);
  write_text_file(dir + "/residual_report.json", json + "\n");
  if (!paths.quiet) {
    std::cout << "residual: report written to " << dir << "/residual_report.json\n";
  }
  return 0;
}

namespace {

struct SweepRow {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::string stop_reason;
  double h5a = 0.0;
  double h5b = 0.0;
};

SweepRow sweep_point(const RunConfig& base, double value) {
  SweepRow row;
  row.value = value;
  try {
    RunConfig point = base;
    point.verify.reseed_trials = 0;  // probes are pointless inside a scan
    const SweepConfig& sweep = *base.sweep;
    if (sweep.parameter == "omega") {
      point.frequency.omega = value;
    } else {
      for (InteractionTerm& term :
           point.interactions[static_cast<std::size_t>(sweep.interaction_index)].terms) {
        term.coeff *= value;
      }
    }
    Model model = point.make_model();
    SolveBundle bundle = solve_pipeline(point, model, model.zero_series());
    row.converged = bundle.run.converged;
    row.iterations = bundle.run.state.iteration;
    row.final_residual = bundle.run.state.residual_norm;
    row.stop_reason = bundle.run.stop_reason;
    row.h5a = bundle.initial.h5a;
    row.h5b = bundle.initial.h5b;
  } catch (const Error& e) {
    row.converged = false;
    row.stop_reason = error_code_name(e.code());
    row.final_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace

int run_sweep(const RunConfig& config, const RunPaths& paths) {
  if (!config.sweep.has_value()) {
    throw Error(ErrorCode::ValidationError, "sweep: config has no sweep block");
  }
  const std::string dir = ensure_out_dir(config, paths);

  std::vector<double> values = config.sweep->values;
  std::vector<std::future<SweepRow>> futures;
  futures.reserve(values.size());
  for (double v : values) {
    futures.push_back(
        std::async(std::launch::async, [&config, v]() { return sweep_point(config, v); }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (std::future<SweepRow>& f : futures) rows.push_back(f.get());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });

  std::string csv = "value,converged,iterations,final_residual,stop_reason,h5a,h5b\n";
  for (const SweepRow& r : rows) {
    csv += format_g17(r.value) + "," + (r.converged ? "1" : "0") + "," +
           std::to_string(r.iterations) + "," + format_g17(r.final_residual) + "," +
           r.stop_reason + "," + format_g17(r.h5a) + "," + format_g17(r.h5b) + "\n";
  }
  write_text_file(dir + "/sweep.csv", csv);

  if (!paths.quiet) {
    int ok = 0;
    for (const SweepRow& r : rows) ok += r.converged ? 1 : 0;
    std::cout << "sweep: " << ok << "/" << rows.size() << " points converged; csv: " << dir
              << "/sweep.csv\n";
  }
  return 0;
}

}  // namespace qpkam
