#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qpkam/hull_io.hpp"
#include "qpkam/runner.hpp"
#include "support.hpp"

using namespace qpkam;
using namespace qpkam::testing;

namespace fs = std::filesystem;

namespace {

// Small, fast variant of the desk configuration for end-to-end runs.
const char* kSmallDesk = R"({
  "frequency": {"alpha": [1.0, 0.6180339887498949], "omega": 1.0, "tau": 2.0},
  "gevrey": {"beta": 2.0, "R0": 0.4, "iota": 1.0},
  "truncation": {"K": 12},
  "model": {"interactions": [
    {"L": 1, "twist": 1.0},
    {"L": 0, "terms": [{"coeff": 0.01, "factors": [{"site": 0, "cos": [1, 0]}]}]}
  ]},
  "schedule": {"max_iterations": 8, "epsilon_floor": 1e-12},
  "verify": {"phis": [0.3], "reseed_trials": 0}
})";

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qpkam_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("config parsing fills defaults for a minimal file") {
  RunConfig cfg = parse_config_text(kSmallDesk);
  CHECK(cfg.truncation.padding == 2);
  CHECK(cfg.truncation.tol.drop_rel == 1e-16);
  CHECK(cfg.schedule.max_iterations == 8);
  CHECK(cfg.frequency.kmax == 0);  // resolved to 2K at model build
  Model model = cfg.make_model();
  CHECK(model.freq().kmax == 24);
  CHECK(model.freq().nu > 0.0);
  CHECK(model.cutoff() == 12);
}

TEST_CASE("config validation reports every violation") {
  const char* bad = R"({
    "frequency": {"alpha": [1.0, 0.6180339887498949], "omega": 1.0, "tau": 2.0},
    "gevrey": {"beta": 0.5, "R0": -1.0, "iota": 1.0},
    "truncation": {"K": 12},
    "model": {"interactions": [{"L": 1, "twist": 1.0}]}
  })";
  try {
    parse_config_text(bad);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    std::string msg = e.what();
    CHECK(msg.find("beta must be >= 1") != std::string::npos);
    CHECK(msg.find("R0") != std::string::npos);
  }
}

TEST_CASE("a model without a twist needs the explicit override") {
  const char* no_twist = R"({
    "frequency": {"alpha": [1.0, 0.6180339887498949], "omega": 1.0, "tau": 2.0},
    "gevrey": {"beta": 2.0, "R0": 0.4, "iota": 1.0},
    "truncation": {"K": 12},
    "model": {"interactions": [
      {"L": 0, "terms": [{"coeff": 0.01, "factors": [{"site": 0, "cos": [1, 0]}]}]}
    ]}
  })";
  try {
    parse_config_text(no_twist);
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("H4") != std::string::npos);
  }

  std::string with_override = no_twist;
  const std::string marker = "\"interactions\"";
  with_override.insert(with_override.find(marker), "\"allow_degenerate_twist\": true, ");
  RunConfig cfg = parse_config_text(with_override);
  CHECK(cfg.allow_degenerate_twist);
}

TEST_CASE("malformed JSON raises ParseError") {
  CHECK_THROWS_AS(parse_config_text("{ not json"), Error);
  try {
    parse_config_text("{}");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);  // structurally valid, empty
  }
}

TEST_CASE("hull files round-trip every coefficient exactly") {
  TempDir tmp("hull");
  HullState state;
  state.h = random_series(2, 10, 2.0, 0.4, 0.789, 5000);
  state.radius = 0.3712345678901234;
  state.iteration = 7;
  state.residual_norm = 1.234567890123456e-11;
  state.accumulated_delta_norm = 9.87654321e-3;

  const std::string path = (tmp.path / "hull.txt").string();
  save_hull(state, 2.0, path);
  HullFile loaded = load_hull(path);

  CHECK(loaded.beta == 2.0);
  CHECK(loaded.state.radius == state.radius);
  CHECK(loaded.state.iteration == 7);
  CHECK(loaded.state.residual_norm == state.residual_norm);
  CHECK(loaded.state.accumulated_delta_norm == state.accumulated_delta_norm);
  CHECK(loaded.state.h.dim() == 2);
  CHECK(loaded.state.h.cutoff() == 10);
  bool identical = true;
  state.h.for_each([&](const Mode& k, Complex c) {
    identical = identical && loaded.state.h.coeff(k) == c;
  });
  CHECK(identical);
  CHECK(gevrey_norm(loaded.state.h, 2.0, 0.4) == gevrey_norm(state.h, 2.0, 0.4));
}

TEST_CASE("hull file format errors") {
  TempDir tmp("hullbad");
  const std::string path = (tmp.path / "h.txt").string();

  {
    std::ofstream out(path);
    out << "qpkam-hull v1\ndim 2\ncutoff 4\nbeta 2.0\nradius 0.4\niteration 0\n";
    out << "residual_norm 0.0\naccumulated_delta_norm 0.0\nmodes 5\n0 1 1.0 0.0\n";
  }
  CHECK_THROWS_AS(load_hull(path), Error);  // truncated mode table

  {
    std::ofstream out(path);
    out << "qpkam-hull v9\ndim 2\n";
  }
  try {
    load_hull(path);
    FAIL("expected FormatError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }

  {
    std::ofstream out(path);
    out << "something else\n";
  }
  CHECK_THROWS_AS(load_hull(path), Error);
}

TEST_CASE("solve runner writes deterministic artifacts") {
  RunConfig cfg = parse_config_text(kSmallDesk);
  TempDir a("runa"), b("runb");
  RunPaths pa{(a.path).string(), "", true};
  RunPaths pb{(b.path).string(), "", true};
  CHECK(run_solve(cfg, pa) == 0);
  CHECK(run_solve(cfg, pb) == 0);

  CHECK(fs::exists(a.path / "run_report.json"));
  CHECK(fs::exists(a.path / "residual_history.csv"));
  CHECK(fs::exists(a.path / "hull.txt"));

  CHECK(read_file(a.path / "run_report.json") == read_file(b.path / "run_report.json"));
  CHECK(read_file(a.path / "residual_history.csv") == read_file(b.path / "residual_history.csv"));
  CHECK(read_file(a.path / "hull.txt") == read_file(b.path / "hull.txt"));

  const std::string report = read_file(a.path / "run_report.json");
  CHECK(report.find("\"converged\":true") != std::string::npos);
  CHECK(report.find("\"stop_reason\":\"Converged\"") != std::string::npos);

  // the saved hull certifies and recomputes the same residual
  RunPaths pc{(a.path / "cert").string(), (a.path / "hull.txt").string(), true};
  CHECK(run_certify(cfg, pc) == 0);
  CHECK(fs::exists(a.path / "cert" / "certify_report.json"));
  RunPaths pr{(a.path / "res").string(), (a.path / "hull.txt").string(), true};
  CHECK(run_residual(cfg, pr) == 0);
}

TEST_CASE("certify exits zero even when hypotheses fail") {
  // an oversized long-range bound drives (N-)^2 T delta past 1/2
  std::string cfg_text(kSmallDesk);
  const std::string marker = "{\"L\": 0";
  cfg_text.insert(cfg_text.find(marker),
                  "{\"L\": 2, \"M\": 1000.0, \"terms\": [{\"coeff\": 1e-9, \"factors\": "
                  "[{\"site\": 0, \"cos\": [1, 0]}, {\"site\": 2, \"cos\": [0, 1]}]}]}, ");
  RunConfig cfg = parse_config_text(cfg_text);
  TempDir tmp("certfail");
  RunPaths paths{tmp.path.string(), "", true};
  CHECK(run_certify(cfg, paths) == 0);
  const std::string report = read_file(tmp.path / "certify_report.json");
  CHECK(report.find("\"name\":\"H5\",\"pass\":false") != std::string::npos);
}

TEST_CASE("sweep over the rotation number") {
  std::string cfg_text(kSmallDesk);
  cfg_text.insert(cfg_text.rfind('}'),
                  R"(, "sweep": {"parameter": "omega", "values": [1.0, 0.9443]})");
  RunConfig cfg = parse_config_text(cfg_text);
  TempDir tmp("sweepw");
  RunPaths paths{tmp.path.string(), "", true};
  CHECK(run_sweep(cfg, paths) == 0);
  const std::string csv = read_file(tmp.path / "sweep.csv");
  CHECK(csv.find("9.4430000000000003e-01") != std::string::npos);
  CHECK(csv.find("1.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("sweep runner emits an ordered csv") {
  std::string cfg_text(kSmallDesk);
  cfg_text.insert(cfg_text.rfind('}'),
                  R"(, "sweep": {"parameter": "amplitude", "interaction_index": 1,
                      "values": [4.0, 1.0, 2.0]})");
  RunConfig cfg = parse_config_text(cfg_text);
  TempDir tmp("sweep");
  RunPaths paths{tmp.path.string(), "", true};
  CHECK(run_sweep(cfg, paths) == 0);
  const std::string csv = read_file(tmp.path / "sweep.csv");
  CHECK(csv.find("value,converged,iterations,final_residual,stop_reason,h5a,h5b") == 0);
  // rows come back sorted by the swept value
  const auto p1 = csv.find("1.0000000000000000e+00");
  const auto p2 = csv.find("2.0000000000000000e+00");
  const auto p4 = csv.find("4.0000000000000000e+00");
  CHECK(p1 != std::string::npos);
  CHECK(p1 < p2);
  CHECK(p2 < p4);
}
