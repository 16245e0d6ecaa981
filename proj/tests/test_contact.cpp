#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "leofl/contact.hpp"
#include "leofl/orbital.hpp"

using namespace leofl;

namespace {

GroundStation pole_station() {
  return GroundStation{kPi / 2.0, 0.0, 0.0, 10.0 * kPi / 180.0};
}

std::vector<OrbitalElements> single_low_sat() {
  OrbitalElements el;
  el.semi_major_axis_m = kEarthRadiusM + 500e3;
  el.inclination_rad = 80.0 * kPi / 180.0;
  el.raan_rad = 0.0;
  el.phase0_rad = 0.0;
  return {el};
}

}  // namespace

TEST_CASE("single low satellite: window count, durations, refinement") {
  const auto els = single_low_sat();
  const auto gs = pole_station();
  const auto windows = contact_windows(els, gs, 0.0, 86400.0, 10.0, 0.1);

  REQUIRE(!windows.empty());
  // One pass near the pole per ~94.5 min orbit.
  CHECK(windows.size() >= 10);
  CHECK(windows.size() <= 20);
  for (const auto& w : windows) {
    CHECK(w.satellite_id == 0);
    CHECK(w.start_s >= 0.0);
    CHECK(w.end_s <= 86400.0);
    const double dur = w.end_s - w.start_s;
    CHECK(dur >= 60.0);
    CHECK(dur <= 1200.0);
  }
  // Windows are disjoint and time-ordered.
  for (std::size_t i = 1; i < windows.size(); ++i)
    CHECK(windows[i].start_s > windows[i - 1].end_s);

  // Midpoints are visible; points just outside the refined endpoints are not.
  for (const auto& w : windows) {
    const double mid = 0.5 * (w.start_s + w.end_s);
    CHECK(is_visible(gs_position(gs, mid), sat_position(els[0], mid), gs.min_elevation_rad));
    if (w.start_s > 0.3) {
      const double before = w.start_s - 0.3;
      CHECK_FALSE(is_visible(gs_position(gs, before), sat_position(els[0], before),
                             gs.min_elevation_rad));
    }
    if (w.end_s < 86400.0 - 0.3) {
      const double after = w.end_s + 0.3;
      CHECK_FALSE(is_visible(gs_position(gs, after), sat_position(els[0], after),
                             gs.min_elevation_rad));
    }
  }
}

TEST_CASE("halving the coarse step moves endpoints by at most the tolerance") {
  const auto els = single_low_sat();
  const auto gs = pole_station();
  const auto w10 = contact_windows(els, gs, 0.0, 86400.0, 10.0, 0.05);
  const auto w5 = contact_windows(els, gs, 0.0, 86400.0, 5.0, 0.05);
  REQUIRE(w10.size() == w5.size());
  for (std::size_t i = 0; i < w10.size(); ++i) {
    CHECK(std::fabs(w10[i].start_s - w5[i].start_s) <= 2.0 * 0.05 + 1e-9);
    CHECK(std::fabs(w10[i].end_s - w5[i].end_s) <= 2.0 * 0.05 + 1e-9);
  }
}

TEST_CASE("windows agree with a one-second brute-force scan") {
  const auto els = single_low_sat();
  const auto gs = pole_station();
  const double horizon = 30000.0;
  const auto windows = contact_windows(els, gs, 0.0, horizon, 10.0, 0.1);

  // Independent scan: visibility sampled every second.
  std::vector<std::pair<double, double>> scanned;
  bool inside = false;
  double start = 0.0;
  for (int t = 0; t <= static_cast<int>(horizon); ++t) {
    const bool vis = is_visible(gs_position(gs, t), sat_position(els[0], t),
                                gs.min_elevation_rad);
    if (vis && !inside) {
      inside = true;
      start = t;
    } else if (!vis && inside) {
      inside = false;
      scanned.emplace_back(start, t - 1.0);
    }
  }
  if (inside) scanned.emplace_back(start, horizon);

  REQUIRE(windows.size() == scanned.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    CHECK(std::fabs(windows[i].start_s - scanned[i].first) <= 1.1);
    CHECK(std::fabs(windows[i].end_s - scanned[i].second) <= 1.1);
  }
}

TEST_CASE("a satellite overhead at t0 opens its window at t0") {
  auto els = single_low_sat();
  els[0].phase0_rad = kPi / 2.0;  // highest latitude, above the polar station
  const auto gs = pole_station();
  const auto windows = contact_windows(els, gs, 0.0, 7200.0, 10.0, 0.1);
  REQUIRE(!windows.empty());
  CHECK(windows[0].start_s == doctest::Approx(0.0));
}

TEST_CASE("window still open at the horizon is clipped to t1") {
  auto els = single_low_sat();
  els[0].phase0_rad = kPi / 2.0;
  const auto gs = pole_station();
  // Stop the clock mid-pass (the pass lasts roughly five minutes).
  const auto windows = contact_windows(els, gs, 0.0, 100.0, 10.0, 0.1);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].start_s == doctest::Approx(0.0));
  CHECK(windows[0].end_s == doctest::Approx(100.0));
}

TEST_CASE("equatorial satellite never seen from the pole") {
  OrbitalElements el;
  el.semi_major_axis_m = kEarthRadiusM + 500e3;
  el.inclination_rad = 0.0;
  const auto windows = contact_windows({el}, pole_station(), 0.0, 86400.0, 10.0, 0.1);
  CHECK(windows.empty());
}

TEST_CASE("contact_windows is deterministic") {
  const auto els = single_low_sat();
  const auto gs = pole_station();
  const auto a = contact_windows(els, gs, 0.0, 86400.0, 10.0, 0.1);
  const auto b = contact_windows(els, gs, 0.0, 86400.0, 10.0, 0.1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].start_s == b[i].start_s);  // bitwise
    CHECK(a[i].end_s == b[i].end_s);
  }
}

TEST_CASE("merged schedule is sorted by start time then satellite id") {
  ConstellationSpec spec;
  spec.planes = 2;
  spec.sats_per_plane = 2;
  spec.inclination_rad = 80.0 * kPi / 180.0;
  spec.altitudes_m = {500e3, 2000e3};
  const auto els = build_constellation(spec);
  const auto windows = contact_windows(els, pole_station(), 0.0, 86400.0, 10.0, 0.1);
  REQUIRE(windows.size() > 4);
  for (std::size_t i = 1; i < windows.size(); ++i) {
    const bool ordered = windows[i].start_s > windows[i - 1].start_s ||
                         (windows[i].start_s == windows[i - 1].start_s &&
                          windows[i].satellite_id > windows[i - 1].satellite_id);
    CHECK(ordered);
  }
}

TEST_CASE("contact_windows argument validation") {
  const auto els = single_low_sat();
  const auto gs = pole_station();
  CHECK_THROWS_AS(contact_windows({}, gs, 0.0, 100.0, 10.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_windows(els, gs, 100.0, 100.0, 10.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_windows(els, gs, 200.0, 100.0, 10.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_windows(els, gs, 0.0, 100.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(contact_windows(els, gs, 0.0, 100.0, 10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(contact_windows(els, gs, 0.0, 100.0, 10.0, 20.0), std::invalid_argument);
}

TEST_CASE("visit_stream orders by time with satellite id tie-break") {
  std::vector<ContactEvent> windows = {
      {3, 50.0, 80.0}, {1, 5.0, 30.0}, {0, 5.0, 20.0}, {2, 40.0, 90.0}};
  const auto visits = visit_stream(windows);
  REQUIRE(visits.size() == 4);
  CHECK(visits[0].satellite_id == 0);
  CHECK(visits[0].time_s == doctest::Approx(5.0));
  CHECK(visits[1].satellite_id == 1);
  CHECK(visits[1].time_s == doctest::Approx(5.0));
  CHECK(visits[2].satellite_id == 2);
  CHECK(visits[3].satellite_id == 3);
}

TEST_CASE("sub-window horizon yields an empty schedule for a hidden satellite") {
  OrbitalElements el;
  el.semi_major_axis_m = kEarthRadiusM + 500e3;
  el.inclination_rad = 80.0 * kPi / 180.0;
  el.phase0_rad = kPi;  // opposite side of the orbit
  const auto windows = contact_windows({el}, pole_station(), 0.0, 0.5, 0.1, 0.01);
  CHECK(windows.empty());
}
