#pragma once

#include <vector>

#include "leofl/orbital.hpp"

namespace leofl {

struct ContactEvent {
  int satellite_id = -1;
  double start_s = 0.0;
  double end_s = 0.0;
};

// One exchange opportunity per contact window, taken at the window start.
struct Visit {
  int satellite_id = -1;
  double time_s = 0.0;
};

// Visibility windows of every satellite over [t0, t1]. Transitions are
// located on a coarse time grid and refined by bisection down to
// refine_tol_s; windows shorter than coarse_step_s can be missed, so keep
// the step at or below 10 s for low-orbit geometries. Reported endpoints
// lie on the visible side of each transition. The merged list is sorted by
// (start, satellite id); per satellite the windows are disjoint and sorted.
std::vector<ContactEvent> contact_windows(const std::vector<OrbitalElements>& constellation,
                                          const GroundStation& gs,
                                          double t0_s, double t1_s,
                                          double coarse_step_s, double refine_tol_s);

// Visits (one per window) ordered by time, ties broken by satellite id.
std::vector<Visit> visit_stream(const std::vector<ContactEvent>& windows);

}  // namespace leofl
