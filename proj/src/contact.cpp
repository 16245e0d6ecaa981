#include "leofl/contact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leofl {

namespace {

bool visible_at(const OrbitalElements& el, const GroundStation& gs, double t) {
  return is_visible(gs_position(gs, t), sat_position(el, t), gs.min_elevation_rad);
}

// Bisects a visibility transition inside (lo, hi) until the bracket is at
// most tol wide, then returns the endpoint on the visible side.
double refine_transition(const OrbitalElements& el, const GroundStation& gs,
                         double lo, bool lo_vis, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (visible_at(el, gs, mid) == lo_vis)
      lo = mid;
    else
      hi = mid;
  }
  return lo_vis ? lo : hi;
}

void windows_for_satellite(const OrbitalElements& el, int sat_id,
                           const GroundStation& gs, double t0, double t1,
                           double step, double tol,
                           std::vector<ContactEvent>& out) {
  double prev_t = t0;
  bool prev_vis = visible_at(el, gs, t0);
  double open_start = prev_vis ? t0 : 0.0;
  bool open = prev_vis;

  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil((t1 - t0) / step));
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) * step, t1);
    const bool vis = visible_at(el, gs, t);
    if (vis != prev_vis) {
      const double crossing = refine_transition(el, gs, prev_t, prev_vis, t, tol);
      if (vis) {
        open_start = crossing;
        open = true;
      } else if (open) {
        if (crossing > open_start)
          out.push_back({sat_id, open_start, crossing});
        open = false;
      }
    }
    prev_t = t;
    prev_vis = vis;
  }
  if (open && t1 > open_start) out.push_back({sat_id, open_start, t1});
}

}  // namespace

std::vector<ContactEvent> contact_windows(const std::vector<OrbitalElements>& constellation,
                                          const GroundStation& gs,
                                          double t0_s, double t1_s,
                                          double coarse_step_s, double refine_tol_s) {
  if (constellation.empty())
    throw std::invalid_argument("contact_windows: empty constellation");
  if (!(t1_s > t0_s))
    throw std::invalid_argument("contact_windows: need t0 < t1");
  if (!(coarse_step_s > 0.0))
    throw std::invalid_argument("contact_windows: coarse_step_s must be positive");
  if (!(refine_tol_s > 0.0))
    throw std::invalid_argument("contact_windows: refine_tol_s must be positive");
  if (refine_tol_s >= coarse_step_s)
    throw std::invalid_argument("contact_windows: refine_tol_s must be below coarse_step_s");

  std::vector<ContactEvent> windows;
  for (std::size_t i = 0; i < constellation.size(); ++i)
    windows_for_satellite(constellation[i], static_cast<int>(i), gs, t0_s, t1_s,
                          coarse_step_s, refine_tol_s, windows);

  std::sort(windows.begin(), windows.end(), [](const ContactEvent& a, const ContactEvent& b) {
    if (a.start_s != b.start_s) return a.start_s < b.start_s;
    return a.satellite_id < b.satellite_id;
  });
  return windows;
}

std::vector<Visit> visit_stream(const std::vector<ContactEvent>& windows) {
  std::vector<Visit> visits;
  visits.reserve(windows.size());
  for (const ContactEvent& w : windows) visits.push_back({w.satellite_id, w.start_s});
  std::sort(visits.begin(), visits.end(), [](const Visit& a, const Visit& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    return a.satellite_id < b.satellite_id;
  });
  return visits;
}

}  // namespace leofl
