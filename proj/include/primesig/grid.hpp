#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "primesig/errors.hpp"

namespace primesig {

// Uniform evaluation grid. Points are always derived as origin + i*spacing
// rather than accumulated, so point(i) is reproducible regardless of how
// the grid is traversed or partitioned.
struct UniformGrid {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 0;

  double point(std::size_t i) const { return origin + spacing * static_cast<double>(i); }
  double back() const { return point(count == 0 ? 0 : count - 1); }
  double span() const { return count < 2 ? 0.0 : spacing * static_cast<double>(count - 1); }

  // Smallest grid starting at lo with step dt whose last point reaches hi.
  // A half-step slack absorbs rounding when (hi-lo)/dt is nearly integral.
  static UniformGrid covering(double lo, double hi, double dt) {
    if (!(dt > 0.0)) throw ValidationError("grid spacing must be positive");
    if (!(hi >= lo)) throw ValidationError("grid upper end below lower end");
    UniformGrid g;
    g.origin = lo;
    g.spacing = dt;
    const double steps = (hi - lo) / dt;
    std::size_t n = static_cast<std::size_t>(std::ceil(steps - 0.5 * 1e-9));
    while (lo + dt * static_cast<double>(n) < hi) ++n;
    g.count = n + 1;
    return g;
  }
};

// Amplitudes over a uniform grid plus provenance describing how they were
// produced (method, kernel parameters, error bounds).
struct Signal {
  UniformGrid grid;
  std::vector<double> amplitudes;
  std::map<std::string, std::string> provenance;

  std::size_t size() const { return amplitudes.size(); }
};

}  // namespace primesig
