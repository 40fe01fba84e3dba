#pragma once

#include <array>
#include <string>
#include <vector>

#include "dpcollapse/materials.hpp"
#include "dpcollapse/quantities.hpp"

namespace dpcollapse {

enum class PlateKind { displaced, extended };

/// 1 for a rigidly displaced plate, 1/3 for a plate stretched through its thickness.
double alpha_geo(PlateKind kind);
std::string_view plate_kind_name(PlateKind kind);

struct PlateSpec {
    PlateKind kind = PlateKind::displaced;
    Area area;
    Length thickness;
    Material material;

    Volume volume() const { return cubic_meters(area.si() * thickness.si()); }
    /// The plate formulas assume lateral size >> thickness; false when sqrt(A) < 10 d.
    bool is_thin() const;
};

/// A solid made of plates that all move with the same relative displacement
/// between two scenarios. Its DP energy is the sum of the plate energies.
struct SolidSpec {
    std::vector<PlateSpec> plates;

    /// sum over plates of 2 pi alpha G V rho^2, in J/m^2
    double long_distance_coefficient() const;
    /// largest nuclear spread among the plates (used for decorrelation)
    Length sigma_n() const;
    std::vector<std::string> warnings() const;
};

struct PiezoCapacitorSpec {
    PlateSpec piezo;   // kind = extended
    PlateSpec plate;   // kind = displaced
    int plate_count = 2;

    void validate() const;
    SolidSpec as_solid() const;
};

PiezoCapacitorSpec make_piezo_capacitor(const Material& piezo, const Material& metal, Area area,
                                        Length piezo_thickness, Length plate_thickness);
/// Two displaced metal plates pulled apart by the field across a fixed gap.
SolidSpec make_movable_plates(const Material& metal, Area area, Length plate_thickness);

/// F_geo(x) of the saturating short-distance branch; defined for x > 4 only.
double geometric_function(PlateKind kind, double x);

struct ShortDistanceEnergy {
    Energy energy;
    bool blended = false;   // query fell between the quadratic and saturating branches
};

ShortDistanceEnergy dp_energy_short_distance_detail(const PlateSpec& plate, Length ds);
Energy dp_energy_short_distance(const PlateSpec& plate, Length ds);

Energy dp_energy_long_distance(const PlateSpec& plate, Length ds);
Energy dp_energy_plate(const PlateSpec& plate, Length ds, bool include_short_distance);

/// Energy of a composite solid for relative displacement ds. `blended` is set
/// when any short-distance term was evaluated inside the blend zone.
Energy dp_energy_solid(const SolidSpec& solid, Length ds, bool include_short_distance,
                       bool* blended = nullptr);

Energy dp_energy_piezo_capacitor(const PiezoCapacitorSpec& spec, Length ds_i, Length ds_j,
                                 bool include_short_distance);

// ---- brute-force lattice oracle ----

struct LatticeSpec {
    std::array<int, 3> dimensions{12, 12, 12};
    Length lattice_constant;
    Mass nucleus_mass;
    Length sigma_n;
    long max_nuclei = 20L * 20 * 20;

    long nuclei() const { return long(dimensions[0]) * dimensions[1] * dimensions[2]; }
    Volume volume() const;
    MassDensity density() const;
};

LatticeSpec lattice_for(const Material& m, std::array<int, 3> dims);

/// DP energy between a simple-cubic lattice of Gaussian nuclei and a copy
/// shifted by `ds`, summed pairwise with the closed-form Gaussian-Gaussian
/// interaction. Deterministic; the result does not depend on `threads`.
Energy dp_energy_numeric_oracle(const LatticeSpec& lattice, const std::array<Length, 3>& ds,
                                int threads = 1);

}  // namespace dpcollapse
