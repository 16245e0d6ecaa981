#include "leofl/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace leofl {

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double mean_motion_rad_per_s(const OrbitalElements& el) {
  const double a = el.semi_major_axis_m;
  return std::sqrt(kMuEarth / (a * a * a));
}

double orbital_period_s(const OrbitalElements& el) {
  return kTwoPi / mean_motion_rad_per_s(el);
}

std::vector<OrbitalElements> build_constellation(const ConstellationSpec& spec) {
  if (spec.planes <= 0)
    throw std::invalid_argument("build_constellation: planes must be positive");
  if (spec.sats_per_plane <= 0)
    throw std::invalid_argument("build_constellation: sats_per_plane must be positive");
  if (spec.altitudes_m.size() != static_cast<std::size_t>(spec.planes))
    throw std::invalid_argument(
        "build_constellation: need one altitude per plane, got " +
        std::to_string(spec.altitudes_m.size()) + " for " +
        std::to_string(spec.planes) + " planes");
  for (double alt : spec.altitudes_m)
    if (!(alt > 0.0))
      throw std::invalid_argument("build_constellation: altitudes must be positive");

  std::vector<OrbitalElements> els;
  els.reserve(static_cast<std::size_t>(spec.planes) * spec.sats_per_plane);
  for (int k = 0; k < spec.planes; ++k) {
    const double raan = normalize_angle(kTwoPi * k / spec.planes);
    const double a = kEarthRadiusM + spec.altitudes_m[static_cast<std::size_t>(k)];
    for (int s = 0; s < spec.sats_per_plane; ++s) {
      OrbitalElements el;
      el.semi_major_axis_m = a;
      el.inclination_rad = normalize_angle(spec.inclination_rad);
      el.raan_rad = raan;
      el.phase0_rad =
          normalize_angle(kTwoPi * s / spec.sats_per_plane + k * spec.phasing_offset_rad);
      els.push_back(el);
    }
  }
  return els;
}

Vec3 sat_position(const OrbitalElements& el, double t_s) {
  const double a = el.semi_major_axis_m;
  const double u = el.phase0_rad + mean_motion_rad_per_s(el) * t_s;
  const double cu = std::cos(u), su = std::sin(u);
  const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
  const double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
  return {a * (cu * co - su * ci * so),
          a * (cu * so + su * ci * co),
          a * (su * si)};
}

Vec3 gs_position(const GroundStation& gs, double t_s) {
  const double r = kEarthRadiusM + gs.altitude_m;
  const double theta = gs.longitude_rad + kEarthRotationRadPerS * t_s;
  const double clat = std::cos(gs.latitude_rad);
  return {r * clat * std::cos(theta),
          r * clat * std::sin(theta),
          r * std::sin(gs.latitude_rad)};
}

bool is_visible(const Vec3& r_gs, const Vec3& r_sat, double min_elevation_rad) {
  const double g = norm(r_gs);
  if (g == 0.0)
    throw std::invalid_argument("is_visible: ground station at the frame origin");
  const Vec3 d = r_sat - r_gs;
  const double dn = norm(d);
  if (dn == 0.0)
    throw std::invalid_argument("is_visible: satellite coincides with the ground station");
  const double c = std::clamp(dot(r_gs, d) / (g * dn), -1.0, 1.0);
  return std::acos(c) <= kPi / 2.0 - min_elevation_rad;
}

}  // namespace leofl
