#pragma once

#include <memory>
#include <string>
#include <variant>

#include "dpcollapse/dpenergy.hpp"
#include "dpcollapse/quantities.hpp"

namespace dpcollapse {

/// Displacement of one scenario relative to the undisplaced reference, as a
/// function of time since the avalanche started. Zero for t <= 0.
class DisplacementProfile {
public:
    struct Zero {};
    struct Constant { Length amplitude; };
    struct Exponential { Length amplitude; Time tau; };       // A (1 - exp(-t/tau))
    struct Quadratic { Acceleration coefficient; };           // c t^2
    struct LinearRamp { Length amplitude; Time tau; };        // A t / tau, unbounded
    struct Delayed { std::shared_ptr<const DisplacementProfile> inner; Time delay; };

    using Form = std::variant<Zero, Constant, Exponential, Quadratic, LinearRamp, Delayed>;

    DisplacementProfile() : form_(Zero{}) {}

    static DisplacementProfile zero() { return {}; }
    static DisplacementProfile constant(Length amplitude);
    static DisplacementProfile exponential(Length amplitude, Time tau);
    static DisplacementProfile quadratic(Acceleration coefficient);
    static DisplacementProfile linear_ramp(Length amplitude, Time tau);
    static DisplacementProfile delayed(DisplacementProfile inner, Time delay);

    Length at(Time t) const;
    const Form& form() const { return form_; }
    bool is_zero() const { return std::holds_alternative<Zero>(form_); }
    std::string describe() const;

private:
    explicit DisplacementProfile(Form f) : form_(std::move(f)) {}
    Form form_;
};

/// Charging curve V_E (1 - exp(-t / (R C))); zero for t < 0.
Voltage piezo_voltage_profile(Voltage V_E, Resistance R_series, Capacitance C_p, Time t);

/// Plate displacement of a piezo layer at voltage V: d33 V / 2.
Length displacement_from_voltage(LengthPerVoltage d33, Voltage V);

/// Ballistic plate displacement eps0 V^2 t^2 / (2 d^2 d_m rho_m).
Length movable_plate_displacement(Voltage V_E, Length d, Length d_m, MassDensity rho_m, Time t);

/// Profile of a piezo plate charged through R_series.
DisplacementProfile piezo_displacement_profile(LengthPerVoltage d33, Voltage V_E,
                                               Resistance R_series, Capacitance C_p);
DisplacementProfile movable_plate_profile(Voltage V_E, Length d, Length d_m, MassDensity rho_m);

struct ActionOptions {
    double rel_tol = 1e-8;
    bool force_quadrature = false;
};

/// Integral over [0, t_bar] of the DP energy between two scenarios. Uses the
/// exact antiderivative when both profiles are built from constant and
/// exponential terms (or both are polynomial) and short-distance terms are
/// off; adaptive Gauss-Kronrod otherwise.
Action competition_action(const SolidSpec& solid, const DisplacementProfile& pi,
                          const DisplacementProfile& pj, Time t_bar, bool include_short_distance,
                          const ActionOptions& opt = {});

/// Instantaneous pair energy at time t.
Energy pair_energy(const SolidSpec& solid, const DisplacementProfile& pi,
                   const DisplacementProfile& pj, Time t, bool include_short_distance,
                   bool* blended = nullptr);

}  // namespace dpcollapse
