#pragma once

#include <string>
#include <vector>

#include "mvt/errors.hpp"
#include "mvt/measure.hpp"

namespace mvt {

// A measure-valued path sampled at discrete times. All slices carry the same
// atoms in the same order (atom identity is stable: no coalescing happens
// during evolution), so per-atom traces can be read across slices.
struct Trajectory {
  std::vector<double> times;            // strictly increasing, times[0] == 0
  std::vector<ParticleMeasure> slices;  // one per time
  std::string provenance;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  const ParticleMeasure& initial() const { return slices.front(); }
  const ParticleMeasure& final() const { return slices.back(); }

  void validate() const {
    if (times.empty() || times.size() != slices.size()) {
      throw InvalidParameter("trajectory: times/slices mismatch");
    }
    if (times.front() != 0.0) throw InvalidParameter("trajectory: times must start at 0");
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      if (!(times[i] < times[i + 1])) {
        throw InvalidParameter("trajectory: times must increase strictly");
      }
    }
    for (const ParticleMeasure& s : slices) {
      if (s.size() != slices.front().size()) {
        throw InvalidParameter("trajectory: slices must share atom count");
      }
    }
  }
};

}  // namespace mvt
