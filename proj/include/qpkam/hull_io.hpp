#ifndef QPKAM_HULL_IO_HPP
#define QPKAM_HULL_IO_HPP

#include <string>

#include "qpkam/solver.hpp"

namespace qpkam {

struct HullFile {
  HullState state;
  double beta = 0.0;
};

// Plain-text coefficient table: a versioned header (dim, cutoff, beta,
// radius, iteration bookkeeping) followed by one `k... re im` record per
// stored mode at 17 significant digits — decimal round trips are exact.
void save_hull(const HullState& state, double beta, const std::string& path);
HullFile load_hull(const std::string& path);

std::string format_g17(double value);

}  // namespace qpkam

#endif
