#ifndef QWELL_POTENTIALS_HPP
#define QWELL_POTENTIALS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "qwell/errors.hpp"

namespace qwell {

// Everything internal runs in SI; user-facing parameters are eV / angstrom /
// GHz and converted exactly at the boundary.
inline constexpr double kElectronVoltJ = 1.602176634e-19;  // J per eV (exact)
inline constexpr double kAngstromM = 1e-10;                // m per angstrom
inline constexpr double kGigahertzHz = 1e9;                // s^-1 per GHz
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kAtomicMassUnitKg = 1.66053906660e-27;  // kg

/// Mass of atomic hydrogen. The tunneling "particle" is the rigid plane of
/// three hydrogens, so its mass is a configurable multiple of this.
inline constexpr double kHydrogenMassKg = 1.00794 * kAtomicMassUnitKg;

struct PhysicalConstants {
  double hbar = kHbar;           // J s
  double m_h = kHydrogenMassKg;  // kg
  double mass_multiple = 3.0;    // particle mass in units of m_h

  double particle_mass() const { return mass_multiple * m_h; }

  void validate() const {
    if (!(hbar > 0.0) || !(m_h > 0.0) || !(mass_multiple > 0.0))
      throw ValidationError("PhysicalConstants: all fields must be positive");
  }
};

enum class Unit { electron_volt, angstrom, gigahertz, si_base };

inline Unit unit_from_string(std::string_view s) {
  if (s == "eV") return Unit::electron_volt;
  if (s == "angstrom" || s == "A") return Unit::angstrom;
  if (s == "GHz") return Unit::gigahertz;
  if (s == "SI" || s == "si") return Unit::si_base;
  throw UnknownUnit("unknown unit tag: " + std::string(s));
}

/// Exact conversion of a tagged quantity to SI base units.
inline double to_si(double value, Unit u) {
  switch (u) {
    case Unit::electron_volt: return value * kElectronVoltJ;
    case Unit::angstrom: return value * kAngstromM;
    case Unit::gigahertz: return value * kGigahertzHz;
    case Unit::si_base: return value;
  }
  throw UnknownUnit("unknown unit tag");
}

inline double from_si(double value, Unit u) {
  switch (u) {
    case Unit::electron_volt: return value / kElectronVoltJ;
    case Unit::angstrom: return value / kAngstromM;
    case Unit::gigahertz: return value / kGigahertzHz;
    case Unit::si_base: return value;
  }
  throw UnknownUnit("unknown unit tag");
}

/// Double square well: depth v0, central barrier top v1 (both below zero
/// energy), outer half-width l0, inner half-width l1.
struct DswpParams {
  double v0_ev = 0.5;
  double v1_ev = 0.25;
  double l0_angstrom = 0.672;
  double l1_angstrom = 0.128;

  double v0() const { return v0_ev * kElectronVoltJ; }
  double v1() const { return v1_ev * kElectronVoltJ; }
  double l0() const { return l0_angstrom * kAngstromM; }
  double l1() const { return l1_angstrom * kAngstromM; }

  void validate() const {
    if (!(v0_ev > v1_ev && v1_ev > 0.0))
      throw ValidationError("DswpParams: requires v0 > v1 > 0");
    if (!(l0_angstrom > l1_angstrom && l1_angstrom > 0.0))
      throw ValidationError("DswpParams: requires l0 > l1 > 0");
  }
};

struct IswpParams {
  double width_angstrom = 2.0 * 0.672;  // L = 2 L0 of the default double well

  double width() const { return width_angstrom * kAngstromM; }

  void validate() const {
    if (!(width_angstrom > 0.0)) throw ValidationError("IswpParams: width must be > 0");
  }
};

/// Smooth double-well model V(x) = -C sech^2(x/2rho) + D sech^4(x/2rho).
/// Evaluation only; its spectrum is out of scope.
struct ManningParams {
  double c_depth;    // J
  double d_height;   // J
  double rho_scale;  // m

  void validate() const {
    if (!(c_depth > 0.0 && d_height > 0.0 && rho_scale > 0.0))
      throw ValidationError("ManningParams: all fields must be positive");
  }
};

/// Piecewise value of the double square well, in joules.
/// Boundary convention: |x| = l1 belongs to the inner region (-V1),
/// |x| = l0 to the well region (-V0).
inline double dswp_value(const DswpParams& p, double x_si) {
  double ax = std::fabs(x_si);
  if (ax <= p.l1()) return -p.v1();
  if (ax <= p.l0()) return -p.v0();
  return 0.0;
}

/// Infinite square well on (0, L): zero inside, +infinity outside
/// (boundaries exclusive).
inline double iswp_value(const IswpParams& p, double x_si) {
  if (x_si > 0.0 && x_si < p.width()) return 0.0;
  return std::numeric_limits<double>::infinity();
}

inline double manning_value(const ManningParams& p, double x_si) {
  double s = 1.0 / std::cosh(x_si / (2.0 * p.rho_scale));
  double s2 = s * s;
  return -p.c_depth * s2 + p.d_height * s2 * s2;
}

}  // namespace qwell

#endif  // QWELL_POTENTIALS_HPP
