#include "dpcollapse/dpenergy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpcollapse {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// The short-distance law is silent for 1 < x <= 4; a monotone cubic Hermite joins the two branches.
constexpr double kQuadraticEnd = 1.0;
constexpr double kSaturatingStart = 4.0;

double geometric_slope(PlateKind kind, double x) {
    if (kind == PlateKind::displaced) return kSqrtPi / (x * x);
    double c = 2.0 + kSqrtPi / 2.0 - kSqrtPi * std::log(4.0);
    return (c - kSqrtPi + kSqrtPi * std::log(x)) / (x * x);
}

double geometric_unchecked(PlateKind kind, double x) {
    if (kind == PlateKind::displaced) return 1.0 - kSqrtPi / x;
    double c = 2.0 + kSqrtPi / 2.0 - kSqrtPi * std::log(4.0);
    return 1.0 - c / x - kSqrtPi * std::log(x) / x;
}

// Dimensionless short-distance shape f(x), energy = T V f(x).
double short_shape(PlateKind kind, double x, bool& blended) {
    double a = alpha_geo(kind);
    if (x <= kQuadraticEnd) return a / 12.0 * x * x;
    if (x > kSaturatingStart) return geometric_unchecked(kind, x);

    blended = true;
    const double x0 = kQuadraticEnd, x1 = kSaturatingStart, h = x1 - x0;
    const double y0 = a / 12.0 * x0 * x0, y1 = geometric_unchecked(kind, x1);
    double m0 = a / 6.0 * x0, m1 = geometric_slope(kind, x1);
    // Fritsch-Carlson limiter
    double delta = (y1 - y0) / h;
    double al = m0 / delta, be = m1 / delta;
    double r = al * al + be * be;
    if (r > 9.0) {
        double tau = 3.0 / std::sqrt(r);
        m0 = tau * al * delta;
        m1 = tau * be * delta;
    }
    double t = (x - x0) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
}

}  // namespace

double alpha_geo(PlateKind kind) { return kind == PlateKind::displaced ? 1.0 : 1.0 / 3.0; }

std::string_view plate_kind_name(PlateKind kind) {
    return kind == PlateKind::displaced ? "displaced" : "extended";
}

bool PlateSpec::is_thin() const { return std::sqrt(area.si()) >= 10.0 * thickness.si(); }

double SolidSpec::long_distance_coefficient() const {
    double k = 0;
    for (const auto& p : plates) {
        double rho = p.material.rho.si();
        k += 2.0 * std::numbers::pi * alpha_geo(p.kind) * kConstants.G * p.volume().si() * rho * rho;
    }
    return k;
}

Length SolidSpec::sigma_n() const {
    Length s{};
    for (const auto& p : plates) s = std::max(s, p.material.sigma_n);
    return s;
}

std::vector<std::string> SolidSpec::warnings() const {
    std::vector<std::string> w;
    for (const auto& p : plates) {
        if (!p.is_thin())
            w.push_back("plate '" + p.material.name +
                        "' is not thin (sqrt(area) < 10 x thickness); plate formulas lose accuracy");
    }
    return w;
}

void PiezoCapacitorSpec::validate() const {
    if (piezo.kind != PlateKind::extended) throw DomainError("piezo layer must be an extended plate");
    if (plate.kind != PlateKind::displaced) throw DomainError("metal plates must be displaced plates");
    if (piezo.area != plate.area) throw DomainError("piezo and plate areas must match");
    if (plate_count < 0) throw DomainError("plate count must be non-negative");
    if (!(piezo.area.si() > 0) || !(piezo.thickness.si() > 0) || !(plate.thickness.si() > 0))
        throw DomainError("piezo capacitor geometry must be positive");
}

SolidSpec PiezoCapacitorSpec::as_solid() const {
    SolidSpec s;
    s.plates.push_back(piezo);
    for (int i = 0; i < plate_count; ++i) s.plates.push_back(plate);
    return s;
}

PiezoCapacitorSpec make_piezo_capacitor(const Material& piezo, const Material& metal, Area area,
                                        Length piezo_thickness, Length plate_thickness) {
    PiezoCapacitorSpec s{{PlateKind::extended, area, piezo_thickness, piezo},
                         {PlateKind::displaced, area, plate_thickness, metal},
                         2};
    s.validate();
    return s;
}

SolidSpec make_movable_plates(const Material& metal, Area area, Length plate_thickness) {
    PlateSpec p{PlateKind::displaced, area, plate_thickness, metal};
    return SolidSpec{{p, p}};
}

double geometric_function(PlateKind kind, double x) {
    if (!(x > kSaturatingStart))
        throw DomainError("geometric function is defined only for ds/sigma_n > 4 (got " +
                          std::to_string(x) + "); below that the quadratic branch applies");
    return geometric_unchecked(kind, x);
}

ShortDistanceEnergy dp_energy_short_distance_detail(const PlateSpec& plate, Length ds) {
    double x = std::abs(ds.si()) / plate.material.sigma_n.si();
    bool blended = false;
    double f = short_shape(plate.kind, x, blended);
    double tv = plate.material.tbar_g_over_hbar.si() * kConstants.hbar * plate.volume().si();
    return {joules(tv * f), blended};
}

Energy dp_energy_short_distance(const PlateSpec& plate, Length ds) {
    return dp_energy_short_distance_detail(plate, ds).energy;
}

Energy dp_energy_long_distance(const PlateSpec& plate, Length ds) {
    double rho = plate.material.rho.si();
    double s = ds.si();
    return joules(2.0 * std::numbers::pi * alpha_geo(plate.kind) * kConstants.G * plate.volume().si() *
                  rho * rho * s * s);
}

Energy dp_energy_plate(const PlateSpec& plate, Length ds, bool include_short_distance) {
    if (ds.si() < 0) throw DomainError("displacement must be non-negative");
    Energy e = dp_energy_long_distance(plate, ds);
    if (include_short_distance) e += dp_energy_short_distance(plate, ds);
    return e;
}

Energy dp_energy_solid(const SolidSpec& solid, Length ds, bool include_short_distance,
                       bool* blended) {
    Length a = meters(std::abs(ds.si()));
    Energy e{};
    for (const auto& p : solid.plates) {
        e += dp_energy_long_distance(p, a);
        if (include_short_distance) {
            auto s = dp_energy_short_distance_detail(p, a);
            e += s.energy;
            if (blended && s.blended) *blended = true;
        }
    }
    return e;
}

Energy dp_energy_piezo_capacitor(const PiezoCapacitorSpec& spec, Length ds_i, Length ds_j,
                                 bool include_short_distance) {
    if (ds_i.si() < 0 || ds_j.si() < 0) throw DomainError("displacements must be non-negative");
    return dp_energy_solid(spec.as_solid(), ds_i - ds_j, include_short_distance);
}

}  // namespace dpcollapse
