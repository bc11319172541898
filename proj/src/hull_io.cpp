#include "qpkam/hull_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qpkam {

namespace {

constexpr const char* kMagic = "qpkam-hull";
constexpr const char* kVersion = "v1";

double parse_double(const std::string& token, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == nullptr || *end != '\0') {
    throw Error(ErrorCode::FormatError, std::string("bad numeric field for ") + what);
  }
  return v;
}

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::FormatError, std::string("truncated file: missing ") + what);
  }
  return line;
}

double header_value(std::istream& in, const char* key) {
  std::istringstream ls(expect_line(in, key));
  std::string name, value;
  ls >> name >> value;
  if (name != key) {
    throw Error(ErrorCode::FormatError,
                std::string("expected header field ") + key + ", found " + name);
  }
  return parse_double(value, key);
}

}  // namespace

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", value);
  return buf;
}

void save_hull(const HullState& state, double beta, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::FormatError, "cannot open " + path + " for writing");
  const FourierSeries& h = state.h;
  out << kMagic << " " << kVersion << "\n";
  out << "dim " << h.dim() << "\n";
  out << "cutoff " << h.cutoff() << "\n";
  out << "beta " << format_g17(beta) << "\n";
  out << "radius " << format_g17(state.radius) << "\n";
  out << "iteration " << state.iteration << "\n";
  out << "residual_norm " << format_g17(state.residual_norm) << "\n";
  out << "accumulated_delta_norm " << format_g17(state.accumulated_delta_norm) << "\n";
  out << "modes " << h.nonzero_count() << "\n";
  h.for_each([&](const Mode& k, Complex c) {
    for (int i = 0; i < h.dim(); ++i) out << k[i] << " ";
    out << format_g17(c.real()) << " " << format_g17(c.imag()) << "\n";
  });
  if (!out) throw Error(ErrorCode::FormatError, "write failure on " + path);
}

HullFile load_hull(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FormatError, "cannot open hull file " + path);

  std::istringstream first(expect_line(in, "header"));
  std::string magic, version;
  first >> magic >> version;
  if (magic != kMagic) {
    throw Error(ErrorCode::FormatError, "not a hull coefficient file");
  }
  if (version != kVersion) {
    throw Error(ErrorCode::FormatError, "unsupported format version " + version);
  }

  HullFile file;
  const int dim = static_cast<int>(header_value(in, "dim"));
  const int cutoff = static_cast<int>(header_value(in, "cutoff"));
  file.beta = header_value(in, "beta");
  file.state.radius = header_value(in, "radius");
  file.state.iteration = static_cast<int>(header_value(in, "iteration"));
  file.state.residual_norm = header_value(in, "residual_norm");
  file.state.accumulated_delta_norm = header_value(in, "accumulated_delta_norm");
  const long modes = static_cast<long>(header_value(in, "modes"));

  file.state.h = FourierSeries(dim, cutoff);
  for (long m = 0; m < modes; ++m) {
    std::istringstream ls(expect_line(in, "mode record"));
    Mode k{};
    for (int i = 0; i < dim; ++i) {
      std::string tok;
      if (!(ls >> tok)) throw Error(ErrorCode::FormatError, "truncated mode record");
      k[i] = static_cast<int>(parse_double(tok, "mode index"));
    }
    std::string re, im;
    if (!(ls >> re >> im)) throw Error(ErrorCode::FormatError, "truncated mode record");
    file.state.h.set_coeff(k, Complex(parse_double(re, "re"), parse_double(im, "im")));
  }
  return file;
}

}  // namespace qpkam
