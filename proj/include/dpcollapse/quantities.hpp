#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

struct PhysicalConstants {
    double G;      // m^3 kg^-1 s^-2
    double hbar;   // J s
    double eps0;   // F/m
    double kB;     // J/K
    double c;      // m/s
    double u;      // kg, atomic mass unit
};

// CODATA 2018
inline constexpr PhysicalConstants kConstants{
    6.67430e-11, 1.054571817e-34, 8.8541878128e-12, 1.380649e-23, 299792458.0, 1.66053906660e-27};

enum class Dimension {
    dimensionless,
    time,
    length,
    area,
    volume,
    mass,
    mass_density,
    energy,
    action,
    voltage,
    capacitance,
    resistance,
    frequency,
    frequency_per_volume,
    temperature,
    current,
    length_per_voltage,
    pressure,
    resistivity,
    velocity,
    acceleration,
};

std::string_view dimension_name(Dimension d);

/// Scalar carrying its dimension in the type. The stored value is always SI.
template <Dimension D>
class Quantity {
public:
    static constexpr Dimension dimension = D;

    constexpr Quantity() = default;
    static constexpr Quantity from_si(double v) { return Quantity(v); }

    constexpr double si() const { return v_; }

    constexpr Quantity operator-() const { return Quantity(-v_); }
    constexpr Quantity& operator+=(Quantity o) { v_ += o.v_; return *this; }
    constexpr Quantity& operator-=(Quantity o) { v_ -= o.v_; return *this; }
    constexpr Quantity& operator*=(double s) { v_ *= s; return *this; }
    constexpr Quantity& operator/=(double s) { v_ /= s; return *this; }

    friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity(a.v_ + b.v_); }
    friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity(a.v_ - b.v_); }
    friend constexpr Quantity operator*(Quantity a, double s) { return Quantity(a.v_ * s); }
    friend constexpr Quantity operator*(double s, Quantity a) { return Quantity(a.v_ * s); }
    friend constexpr Quantity operator/(Quantity a, double s) { return Quantity(a.v_ / s); }
    // ratio of like quantities is a plain number
    friend constexpr double operator/(Quantity a, Quantity b) { return a.v_ / b.v_; }

    friend constexpr auto operator<=>(Quantity a, Quantity b) = default;

private:
    constexpr explicit Quantity(double v) : v_(v) {}
    double v_ = 0.0;
};

using Time = Quantity<Dimension::time>;
using Length = Quantity<Dimension::length>;
using Area = Quantity<Dimension::area>;
using Volume = Quantity<Dimension::volume>;
using Mass = Quantity<Dimension::mass>;
using MassDensity = Quantity<Dimension::mass_density>;
using Energy = Quantity<Dimension::energy>;
using Action = Quantity<Dimension::action>;
using Voltage = Quantity<Dimension::voltage>;
using Capacitance = Quantity<Dimension::capacitance>;
using Resistance = Quantity<Dimension::resistance>;
using Frequency = Quantity<Dimension::frequency>;
using FrequencyPerVolume = Quantity<Dimension::frequency_per_volume>;
using Temperature = Quantity<Dimension::temperature>;
using Current = Quantity<Dimension::current>;
using LengthPerVoltage = Quantity<Dimension::length_per_voltage>;
using Pressure = Quantity<Dimension::pressure>;
using Resistivity = Quantity<Dimension::resistivity>;
using Velocity = Quantity<Dimension::velocity>;
using Acceleration = Quantity<Dimension::acceleration>;

inline constexpr Time seconds(double v) { return Time::from_si(v); }
inline constexpr Length meters(double v) { return Length::from_si(v); }
inline constexpr Area square_meters(double v) { return Area::from_si(v); }
inline constexpr Volume cubic_meters(double v) { return Volume::from_si(v); }
inline constexpr Mass kilograms(double v) { return Mass::from_si(v); }
inline constexpr MassDensity kg_per_m3(double v) { return MassDensity::from_si(v); }
inline constexpr Energy joules(double v) { return Energy::from_si(v); }
inline constexpr Action joule_seconds(double v) { return Action::from_si(v); }
inline constexpr Voltage volts(double v) { return Voltage::from_si(v); }
inline constexpr Capacitance farads(double v) { return Capacitance::from_si(v); }
inline constexpr Resistance ohms(double v) { return Resistance::from_si(v); }
inline constexpr Frequency hertz(double v) { return Frequency::from_si(v); }
inline constexpr Temperature kelvin(double v) { return Temperature::from_si(v); }

namespace literals {
constexpr Time operator""_s(long double v) { return seconds(double(v)); }
constexpr Time operator""_us(long double v) { return seconds(double(v) * 1e-6); }
constexpr Time operator""_ns(long double v) { return seconds(double(v) * 1e-9); }
constexpr Length operator""_m(long double v) { return meters(double(v)); }
constexpr Length operator""_mm(long double v) { return meters(double(v) / 1e3); }
constexpr Length operator""_angstrom(long double v) { return meters(double(v) / 1e10); }
constexpr Voltage operator""_V(long double v) { return volts(double(v)); }
constexpr Resistance operator""_Ohm(long double v) { return ohms(double(v)); }
constexpr Capacitance operator""_pF(long double v) { return farads(double(v) / 1e12); }
constexpr Temperature operator""_K(long double v) { return kelvin(double(v)); }
}  // namespace literals

/// A unit symbol: SI value = value * scale * 10^exp10. Powers of ten are kept
/// apart from the mantissa so prefix conversions stay exact.
struct Unit {
    std::string symbol;
    Dimension dimension;
    double scale;
    int exp10;
};

/// Lookup by symbol ("mm", "MHz/cm3", "Å", ...). Throws DimensionError if unknown.
const Unit& unit(std::string_view symbol);
const std::vector<Unit>& unit_table();
/// The SI unit used for output of a dimension ("m", "s", "Hz/m3", ...).
const Unit& si_unit(Dimension d);

/// A number attached to a unit, as read from or written to the user boundary.
struct TaggedQuantity {
    double value;
    Unit unit;

    double si() const;
    Dimension dimension() const { return unit.dimension; }
};

/// Rescale to another unit of the same dimension.
TaggedQuantity convert(const TaggedQuantity& q, const Unit& target);
TaggedQuantity convert(const TaggedQuantity& q, std::string_view target_symbol);

/// Parse "0.2 mm", "1mm2", "4.3 MHz/cm3". A bare number (no unit) parses only
/// when `allow_dimensionless` is set.
TaggedQuantity parse_quantity(std::string_view text, bool allow_dimensionless = false);

template <Dimension D>
Quantity<D> require(const TaggedQuantity& q) {
    if (q.dimension() != D) {
        throw DimensionError("expected " + std::string(dimension_name(D)) + ", got " +
                             std::string(dimension_name(q.dimension())) + " ('" + q.unit.symbol +
                             "')");
    }
    return Quantity<D>::from_si(q.si());
}

template <Dimension D>
double in_unit(Quantity<D> q, std::string_view symbol) {
    return convert(TaggedQuantity{q.si(), si_unit(D)}, symbol).value;
}

}  // namespace dpcollapse
