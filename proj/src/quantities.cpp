#include "dpcollapse/quantities.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace dpcollapse {

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::dimensionless: return "dimensionless";
        case Dimension::time: return "time";
        case Dimension::length: return "length";
        case Dimension::area: return "area";
        case Dimension::volume: return "volume";
        case Dimension::mass: return "mass";
        case Dimension::mass_density: return "mass-density";
        case Dimension::energy: return "energy";
        case Dimension::action: return "action";
        case Dimension::voltage: return "voltage";
        case Dimension::capacitance: return "capacitance";
        case Dimension::resistance: return "resistance";
        case Dimension::frequency: return "frequency";
        case Dimension::frequency_per_volume: return "frequency-per-volume";
        case Dimension::temperature: return "temperature";
        case Dimension::current: return "current";
        case Dimension::length_per_voltage: return "length-per-voltage";
        case Dimension::pressure: return "pressure";
        case Dimension::resistivity: return "resistivity";
        case Dimension::velocity: return "velocity";
        case Dimension::acceleration: return "acceleration";
    }
    return "?";
}

namespace {

using D = Dimension;

std::vector<Unit> make_table() {
    const double eV = 1.602176634e-19;
    return {
        {"1", D::dimensionless, 1, 0},
        {"s", D::time, 1, 0},
        {"ms", D::time, 1, -3},
        {"us", D::time, 1, -6},
        {"µs", D::time, 1, -6},
        {"ns", D::time, 1, -9},
        {"ps", D::time, 1, -12},
        {"m", D::length, 1, 0},
        {"km", D::length, 1, 3},
        {"cm", D::length, 1, -2},
        {"mm", D::length, 1, -3},
        {"um", D::length, 1, -6},
        {"µm", D::length, 1, -6},
        {"nm", D::length, 1, -9},
        {"Angstrom", D::length, 1, -10},
        {"Å", D::length, 1, -10},
        {"m2", D::area, 1, 0},
        {"cm2", D::area, 1, -4},
        {"mm2", D::area, 1, -6},
        {"m3", D::volume, 1, 0},
        {"cm3", D::volume, 1, -6},
        {"mm3", D::volume, 1, -9},
        {"kg", D::mass, 1, 0},
        {"g", D::mass, 1, -3},
        {"u", D::mass, kConstants.u, 0},
        {"kg/m3", D::mass_density, 1, 0},
        {"g/cm3", D::mass_density, 1, 3},
        {"J", D::energy, 1, 0},
        {"eV", D::energy, eV, 0},
        {"J*s", D::action, 1, 0},
        {"Js", D::action, 1, 0},
        {"hbar", D::action, kConstants.hbar, 0},
        {"V", D::voltage, 1, 0},
        {"mV", D::voltage, 1, -3},
        {"kV", D::voltage, 1, 3},
        {"F", D::capacitance, 1, 0},
        {"uF", D::capacitance, 1, -6},
        {"nF", D::capacitance, 1, -9},
        {"pF", D::capacitance, 1, -12},
        {"Ohm", D::resistance, 1, 0},
        {"Ω", D::resistance, 1, 0},
        {"kOhm", D::resistance, 1, 3},
        {"kΩ", D::resistance, 1, 3},
        {"MOhm", D::resistance, 1, 6},
        {"Hz", D::frequency, 1, 0},
        {"kHz", D::frequency, 1, 3},
        {"MHz", D::frequency, 1, 6},
        {"1/s", D::frequency, 1, 0},
        {"Hz/m3", D::frequency_per_volume, 1, 0},
        {"MHz/cm3", D::frequency_per_volume, 1, 12},
        {"K", D::temperature, 1, 0},
        {"A", D::current, 1, 0},
        {"mA", D::current, 1, -3},
        {"uA", D::current, 1, -6},
        {"m/V", D::length_per_voltage, 1, 0},
        {"cm/V", D::length_per_voltage, 1, -2},
        {"pm/V", D::length_per_voltage, 1, -12},
        {"Pa", D::pressure, 1, 0},
        {"MPa", D::pressure, 1, 6},
        {"GPa", D::pressure, 1, 9},
        {"Ohm*m", D::resistivity, 1, 0},
        {"Ohm*cm", D::resistivity, 1, -2},
        {"m/s", D::velocity, 1, 0},
        {"km/s", D::velocity, 1, 3},
        {"m/s2", D::acceleration, 1, 0},
    };
}

// 10^k for |k| <= 22 is exact in binary64; larger shifts never occur here.
double pow10_apply(double v, int k) {
    static constexpr std::array<double, 23> p = {
        1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,  1e9,  1e10, 1e11,
        1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};
    while (k > 22) { v *= p[22]; k -= 22; }
    while (k < -22) { v /= p[22]; k += 22; }
    return k >= 0 ? v * p[std::size_t(k)] : v / p[std::size_t(-k)];
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

const std::vector<Unit>& unit_table() {
    static const std::vector<Unit> table = make_table();
    return table;
}

const Unit& unit(std::string_view symbol) {
    for (const auto& u : unit_table())
        if (u.symbol == symbol) return u;
    throw DimensionError("unknown unit '" + std::string(symbol) + "'");
}

const Unit& si_unit(Dimension d) {
    for (const auto& u : unit_table())
        if (u.dimension == d && u.scale == 1 && u.exp10 == 0) return u;
    throw DimensionError("no SI unit for " + std::string(dimension_name(d)));
}

double TaggedQuantity::si() const {
    return pow10_apply(value * unit.scale, unit.exp10);
}

TaggedQuantity convert(const TaggedQuantity& q, const Unit& target) {
    if (q.unit.dimension != target.dimension) {
        throw DimensionError("cannot convert " + std::string(dimension_name(q.unit.dimension)) +
                             " ('" + q.unit.symbol + "') to " +
                             std::string(dimension_name(target.dimension)) + " ('" +
                             target.symbol + "')");
    }
    double v = q.value;
    if (q.unit.scale != target.scale) v = v * q.unit.scale / target.scale;
    return {pow10_apply(v, q.unit.exp10 - target.exp10), target};
}

TaggedQuantity convert(const TaggedQuantity& q, std::string_view target_symbol) {
    return convert(q, unit(target_symbol));
}

TaggedQuantity parse_quantity(std::string_view text, bool allow_dimensionless) {
    auto s = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data())
        throw DimensionError("not a number: '" + std::string(text) + "'");
    auto rest = trim(std::string_view(ptr, std::size_t(s.data() + s.size() - ptr)));
    if (rest.empty()) {
        if (!allow_dimensionless)
            throw DimensionError("missing unit suffix in '" + std::string(text) + "'");
        return {v, unit("1")};
    }
    return {v, unit(rest)};
}

}  // namespace dpcollapse
