#pragma once

#include <numbers>
#include <vector>

#include "leofl/vec3.hpp"

namespace leofl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Earth gravitational parameter [m^3/s^2], mean radius [m], rotation rate [rad/s].
inline constexpr double kMuEarth = 3.986004418e14;
inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kEarthRotationRadPerS = 7.2921159e-5;

// Circular two-body orbit. Positions are expressed in an Earth-centered
// inertial frame; the Earth rotates underneath (see gs_position).
struct OrbitalElements {
  double semi_major_axis_m = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;    // right ascension of ascending node
  double phase0_rad = 0.0;  // argument of latitude at t = 0
};

struct GroundStation {
  double latitude_rad = 0.0;
  double longitude_rad = 0.0;
  double altitude_m = 0.0;
  double min_elevation_rad = 0.0;
};

// Walker-delta style shell(s): evenly spaced planes, evenly spaced
// satellites per plane, per-plane altitude so mixed shells fit in one spec.
struct ConstellationSpec {
  int planes = 0;
  int sats_per_plane = 0;
  double inclination_rad = 0.0;
  std::vector<double> altitudes_m;  // one entry per plane
  double phasing_offset_rad = 0.0;  // inter-plane phase increment
};

// Maps any angle to [0, 2*pi).
double normalize_angle(double a);

double mean_motion_rad_per_s(const OrbitalElements& el);
double orbital_period_s(const OrbitalElements& el);

// Satellite index (plane k, slot s) gets id k*sats_per_plane + s; plane k
// sits at raan 2*pi*k/planes, slot s at in-plane phase 2*pi*s/sats_per_plane
// plus k times the phasing offset.
std::vector<OrbitalElements> build_constellation(const ConstellationSpec& spec);

// ECI position at time t: R_z(raan) * R_x(inclination) applied to the
// in-plane circular motion of radius a.
Vec3 sat_position(const OrbitalElements& el, double t_s);

// ECI position of the ground station; the site rotates about z at the
// Earth rotation rate starting from its geographic longitude.
Vec3 gs_position(const GroundStation& gs, double t_s);

// True when the satellite sits above the station's minimum-elevation cone:
// the angle between the station's zenith direction and the station-to-
// satellite vector is at most pi/2 - min_elevation.
bool is_visible(const Vec3& r_gs, const Vec3& r_sat, double min_elevation_rad);

}  // namespace leofl
