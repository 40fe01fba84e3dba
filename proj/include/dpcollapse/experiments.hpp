#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpcollapse/dpenergy.hpp"
#include "dpcollapse/dynamics.hpp"
#include "dpcollapse/materials.hpp"
#include "dpcollapse/reduction.hpp"

namespace dpcollapse {

enum class ExperimentKind { piezo_capacitor, movable_plates, delayed_two_state, signalling, reference_aperture };

std::string_view experiment_kind_name(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

/// Thick silicon SPAD; defaults are typical datasheet values.
struct PhotodiodeParams {
    Voltage V_B = volts(420.0);
    Voltage V_E = volts(20.0);
    double p_QE = 0.7;
    Frequency f_DC = hertz(20e3);
    Resistance R_d = ohms(500.0);
    Time t_res = seconds(170e-12);
    Current I_q = Current::from_si(0.1e-3);

    void validate(const std::string& name) const;
};

struct BeamSplitter {
    double T2 = 0.7;   // transmitted intensity, towards photodiode 1
    double R2 = 0.3;   // reflected intensity, towards photodiode 2
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::piezo_capacitor;
    BeamSplitter beam_splitter;
    PhotodiodeParams diode1{volts(420.0), volts(10.0), 0.35};
    PhotodiodeParams diode2{volts(420.0), volts(20.0), 0.70};

    // Geometry. For the piezo capacitor `gap` is the piezo thickness d; for
    // the movable-plates capacitor it is the vacuum gap between the plates.
    Material piezo_material;
    Material plate_material;
    Area area;
    Length gap;
    Length plate_thickness;

    Resistance R_series = ohms(940.0);            // behind photodiode 1
    std::optional<Capacitance> C_bias;            // unset: ideal bias source
    ComponentBudget budget = ComponentBudget::defaults();
    Time t_connected = seconds(2e-6);             // photodiode gate time for dark counts
    std::optional<Time> t_q;                      // charging ends by latching at t_q

    // delayed two-state experiment
    Time delay{};
    Voltage V2_charge = volts(20.0);
    std::optional<Resistance> R_switch;           // defaults to diode2.R_d

    // signalling
    std::optional<Time> signalling_tbar;

    bool include_short_distance = true;
    Time horizon = seconds(10.0);

    void validate() const;
};

/// Defaults for the shipped piezo and movable-plate setups with the built-in materials.
ExperimentConfig default_piezo_config();
ExperimentConfig default_movable_plates_config();

// ---- device relations ----

/// (1 - T2 p1 - R2 p2, T2 p1, R2 p2)
std::vector<double> scenario_intensities(double T2, double R2, double p_QE1, double p_QE2);

/// C / (C + C_p)
double bias_attenuation(Capacitance C_bias, Capacitance C_p);

/// V_E C_p / (C + C_p)
Voltage readout_voltage_drop(Voltage V_E, Capacitance C_bias, Capacitance C_p);

/// min(f_DC t, 1)
double dark_count_probability(Frequency f_DC, Time t_connected);

/// eps0 eps_r A / d of the piezo capacitor
Capacitance piezo_capacitance(const ExperimentConfig& c);

/// The attenuation actually applied to c (1 without a bias bank).
double effective_attenuation(const ExperimentConfig& c);

PiezoCapacitorSpec piezo_spec(const ExperimentConfig& c);
SolidSpec experiment_solid(const ExperimentConfig& c);

/// Intensities and displacement profiles for c, including the aperture and
/// delay variants.
ScenarioSet build_scenario(const ExperimentConfig& c);

// ---- closed-form sizing ----

Area size_piezo_area_max(const ExperimentConfig& c);

enum class ApproxBranch { small_area, near_area_max, large_area };
std::string_view approx_branch_name(ApproxBranch b);

struct ApproxTime {
    Time t_bar;
    ApproxBranch branch;
    std::vector<std::string> warnings;
};

ApproxTime approx_reduction_time_piezo(const ExperimentConfig& c);
Length approx_displacement_piezo(const ExperimentConfig& c);

struct ApproxPlates {
    Time t_bar;
    Length ds2;
};
ApproxPlates approx_movable_plates(const ExperimentConfig& c);

/// Series resistance giving V2/V1 = target_ratio at the reduction time,
/// iterated with the exact solver until R moves by less than 0.1%.
Resistance choose_resistor(const ExperimentConfig& c, double target_ratio);

// ---- full runs ----

struct ExperimentReport {
    ExperimentConfig config;
    ReductionResult result;
    double I2 = 0;
    double p2 = 0;
    double p2_over_I2 = 0;
    Length ds1, ds2;                 // displacements of states 1 and 2 at t_bar_c
    double decorrelation_margin = 0; // ds1 / (6 sigma_n)
    bool decorrelated = false;
    double detector_share = 0;       // detector action / hbar at t_bar_c
    bool detector_negligible = true;
    double p_dark_count = 0;
    Voltage readout_dV;
    std::optional<Capacitance> C_p;
    std::optional<ApproxTime> approx_time;
    std::optional<Length> approx_ds2;
    std::vector<std::string> warnings;
};

ExperimentReport run_experiment(const ExperimentConfig& c);

struct DelayedPoint {
    Time delay;
    double p2;
    bool born;   // the two-state superposition reduced first
};

struct DelayedCurve {
    Time t_bar_01;
    double I2 = 0;
    std::vector<DelayedPoint> points;
    std::vector<std::string> warnings;
};

/// Reduction time of the (0,1) two-state superposition while state 2 is
/// still undisplaced (states 0 and 2 form one bundle).
Time delayed_two_state_time(const ExperimentConfig& c);

DelayedCurve delayed_two_state_curve(const ExperimentConfig& c, const std::vector<Time>& delays);

struct SignallingChain {
    double p_H2, p_H0, p_V1, p_V0;
    double p_H2n, p_H0n, p_V1n, p_V0n;   // after reconfiguration
    double ratio;                        // p'_H / p'_V
};

SignallingChain signalling_chain(double p_QE2, double p_QE1 = 0.35);
double signalling_ratio(double p_QE2);

/// c t_bar_c: extra arm length so the remote photon arrives after reduction.
Length signalling_arm_margin(Time t_bar_c);

}  // namespace dpcollapse
