#include "dpcollapse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dpcollapse {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_num(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

bool is_piezo_kind(ExperimentKind k) { return k != ExperimentKind::movable_plates; }

// Effective excess voltage / permittivity after the bias-bank substitution.
struct PiezoParams {
    double rho_p, rho_m, d, d_m, d33, eps_r, R_d, V, A, f;
};

PiezoParams piezo_params(const ExperimentConfig& c, bool for_delayed_charge = false) {
    double alpha = effective_attenuation(c);
    PiezoParams p{};
    p.rho_p = c.piezo_material.rho.si();
    p.rho_m = c.plate_material.rho.si();
    p.d = c.gap.si();
    p.d_m = c.plate_thickness.si();
    p.d33 = c.piezo_material.d33->si();
    p.eps_r = alpha * *c.piezo_material.eps_r;
    p.A = c.area.si();
    if (for_delayed_charge) {
        p.R_d = c.R_switch.value_or(c.diode2.R_d).si();
        p.V = c.V2_charge.si();
    } else {
        p.R_d = c.diode2.R_d.si();
        p.V = alpha * c.diode2.V_E.si();
    }
    p.f = 1.0 + 6.0 * p.d_m * p.rho_m * p.rho_m / (p.d * p.rho_p * p.rho_p);
    return p;
}

}  // namespace

std::string_view experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::piezo_capacitor: return "piezo-capacitor";
        case ExperimentKind::movable_plates: return "movable-plates";
        case ExperimentKind::delayed_two_state: return "delayed-two-state";
        case ExperimentKind::signalling: return "signalling";
        case ExperimentKind::reference_aperture: return "reference-aperture";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
    for (auto k : {ExperimentKind::piezo_capacitor, ExperimentKind::movable_plates,
                   ExperimentKind::delayed_two_state, ExperimentKind::signalling,
                   ExperimentKind::reference_aperture})
        if (experiment_kind_name(k) == s) return k;
    throw DomainError("unknown experiment kind '" + std::string(s) + "'");
}

void PhotodiodeParams::validate(const std::string& name) const {
    if (!(p_QE >= 0 && p_QE <= 1)) throw DomainError(name + ".p_QE must lie in [0, 1]");
    if (!(V_B.si() > 0) || !(V_E.si() > 0) || !(f_DC.si() >= 0) || !(R_d.si() > 0) ||
        !(t_res.si() > 0) || !(I_q.si() > 0))
        throw DomainError(name + ": electrical parameters must be positive");
}

void ExperimentConfig::validate() const {
    const auto& b = beam_splitter;
    if (!(b.T2 >= 0 && b.T2 <= 1 && b.R2 >= 0 && b.R2 <= 1))
        throw DomainError("beam splitter T2 and R2 must lie in [0, 1]");
    if (b.T2 + b.R2 > 1.0 + 1e-12)
        throw DomainError("beam splitter T2 + R2 = " + fmt_num(b.T2 + b.R2) + " exceeds 1");
    diode1.validate("diode1");
    diode2.validate("diode2");
    if (!(area.si() > 0) || !(gap.si() > 0) || !(plate_thickness.si() > 0))
        throw DomainError("solid area, gap and plate thickness must be positive");
    if (is_piezo_kind(kind)) {
        if (!piezo_material.d33 || !piezo_material.eps_r)
            throw DomainError("piezo material '" + piezo_material.name + "' has no d33 / eps_r");
    }
    if (!(R_series.si() >= 0)) throw DomainError("series resistance must be non-negative");
    if (C_bias && !(C_bias->si() > 0)) throw DomainError("bias capacitance must be positive");
    if (!(t_connected.si() >= 0)) throw DomainError("gate time must be non-negative");
    if (t_q && !(t_q->si() > 0)) throw DomainError("latching time must be positive");
    if (!(delay.si() >= 0)) throw DomainError("delay must be non-negative");
    if (!(V2_charge.si() >= 0)) throw DomainError("charging voltage must be non-negative");
    if (R_switch && !(R_switch->si() > 0)) throw DomainError("switch resistance must be positive");
    if (!(horizon.si() > 0)) throw DomainError("horizon must be positive");
    budget.validate();
    scenario_intensities(b.T2, b.R2, diode1.p_QE, diode2.p_QE);
}

ExperimentConfig default_piezo_config() {
    const auto& db = MaterialDatabase::standard();
    ExperimentConfig c;
    c.kind = ExperimentKind::piezo_capacitor;
    c.piezo_material = db.get("PIC-153");
    c.plate_material = db.get("aluminium");
    c.area = square_meters(kPi * 1.5e-3 * 1.5e-3);
    c.gap = meters(0.2e-3);
    c.plate_thickness = meters(0.1e-3);
    return c;
}

ExperimentConfig default_movable_plates_config() {
    auto c = default_piezo_config();
    c.kind = ExperimentKind::movable_plates;
    c.area = square_meters(2e-3 * 2e-3);
    c.R_series = ohms(0.0);
    return c;
}

std::vector<double> scenario_intensities(double T2, double R2, double p_QE1, double p_QE2) {
    for (double x : {T2, R2, p_QE1, p_QE2})
        if (!(x >= 0 && x <= 1)) throw DomainError("intensity inputs must lie in [0, 1]");
    double I1 = T2 * p_QE1, I2 = R2 * p_QE2;
    if (I1 + I2 > 1.0 + 1e-12)
        throw DomainError("detection probabilities T2 p_QE1 + R2 p_QE2 exceed 1");
    return {std::max(0.0, 1.0 - I1 - I2), I1, I2};
}

double bias_attenuation(Capacitance C_bias, Capacitance C_p) {
    if (!(C_bias.si() > 0) || !(C_p.si() > 0)) throw DomainError("capacitances must be positive");
    if (std::isinf(C_bias.si())) return 1.0;
    return C_bias.si() / (C_bias.si() + C_p.si());
}

Voltage readout_voltage_drop(Voltage V_E, Capacitance C_bias, Capacitance C_p) {
    if (!(C_bias.si() > 0) || !(C_p.si() >= 0)) throw DomainError("capacitances must be positive");
    if (std::isinf(C_bias.si())) return Voltage{};
    return V_E * (C_p.si() / (C_bias.si() + C_p.si()));
}

double dark_count_probability(Frequency f_DC, Time t_connected) {
    if (!(f_DC.si() >= 0) || !(t_connected.si() >= 0))
        throw DomainError("dark count inputs must be non-negative");
    return std::min(f_DC.si() * t_connected.si(), 1.0);
}

Capacitance piezo_capacitance(const ExperimentConfig& c) {
    if (!c.piezo_material.eps_r) throw DomainError("piezo material has no eps_r");
    return farads(kConstants.eps0 * *c.piezo_material.eps_r * c.area.si() / c.gap.si());
}

double effective_attenuation(const ExperimentConfig& c) {
    if (!c.C_bias || !is_piezo_kind(c.kind)) return 1.0;
    return bias_attenuation(*c.C_bias, piezo_capacitance(c));
}

PiezoCapacitorSpec piezo_spec(const ExperimentConfig& c) {
    return make_piezo_capacitor(c.piezo_material, c.plate_material, c.area, c.gap, c.plate_thickness);
}

SolidSpec experiment_solid(const ExperimentConfig& c) {
    if (c.kind == ExperimentKind::movable_plates)
        return make_movable_plates(c.plate_material, c.area, c.plate_thickness);
    return piezo_spec(c).as_solid();
}

ScenarioSet build_scenario(const ExperimentConfig& c) {
    c.validate();
    ScenarioSet s;
    s.solid = experiment_solid(c);
    s.detector_budget = c.budget;
    s.intensities = scenario_intensities(c.beam_splitter.T2, c.beam_splitter.R2, c.diode1.p_QE,
                                         c.diode2.p_QE);
    if (c.kind == ExperimentKind::reference_aperture) {
        // photodiode 1 is blocked: its share stays with the no-detection state
        s.intensities[0] += s.intensities[1];
        s.intensities[1] = 0.0;
    }

    DisplacementProfile p1, p2;
    if (c.kind == ExperimentKind::movable_plates) {
        double rho_m = c.plate_material.rho.si();
        p1 = movable_plate_profile(c.diode1.V_E, c.gap, c.plate_thickness, kg_per_m3(rho_m));
        p2 = movable_plate_profile(c.diode2.V_E, c.gap, c.plate_thickness, kg_per_m3(rho_m));
    } else {
        double alpha = effective_attenuation(c);
        auto Cp = piezo_capacitance(c) * alpha;
        auto d33 = *c.piezo_material.d33;
        p1 = piezo_displacement_profile(d33, c.diode1.V_E * alpha, c.diode1.R_d + c.R_series, Cp);
        if (c.kind == ExperimentKind::delayed_two_state) {
            p2 = piezo_displacement_profile(d33, c.V2_charge, c.R_switch.value_or(c.diode2.R_d), Cp);
            if (c.delay.si() > 0) p2 = DisplacementProfile::delayed(p2, c.delay);
        } else {
            p2 = piezo_displacement_profile(d33, c.diode2.V_E * alpha, c.diode2.R_d, Cp);
        }
    }
    s.profiles = {DisplacementProfile::zero(), p1, p2};
    return s;
}

Area size_piezo_area_max(const ExperimentConfig& c) {
    c.validate();
    auto p = piezo_params(c, c.kind == ExperimentKind::delayed_two_state);
    const auto& k = kConstants;
    if (!(p.V > 0)) throw DomainError("charging voltage must be positive");
    double A = std::sqrt(9.0 * k.hbar / (kPi * k.G * k.eps0 * p.eps_r * p.f * p.R_d)) /
               (p.rho_p * p.d33 * p.V);
    return square_meters(A);
}

std::string_view approx_branch_name(ApproxBranch b) {
    switch (b) {
        case ApproxBranch::small_area: return "small-A";
        case ApproxBranch::near_area_max: return "near-A_max";
        case ApproxBranch::large_area: return "large-A";
    }
    return "?";
}

namespace {

struct BranchChoice {
    ApproxBranch branch;
    std::vector<std::string> warnings;
};

// Between the stated regimes the nearest formula is used with a warning.
BranchChoice choose_branch(double A, double Amax) {
    double r = A / Amax;
    if (r < 0.25) return {ApproxBranch::small_area, {}};
    if (r < 0.5)
        return {ApproxBranch::small_area,
                {"A = " + fmt_num(r) + " A_max lies between the small-A and A ~ A_max regimes; "
                 "small-A formula used"}};
    if (r <= 2.0) {
        if (std::abs(r - 1.0) <= 0.05) return {ApproxBranch::near_area_max, {}};
        return {ApproxBranch::near_area_max,
                {"A = " + fmt_num(r) + " A_max is not close to A_max; A ~ A_max formula used"}};
    }
    return {ApproxBranch::large_area, {}};
}

}  // namespace

ApproxTime approx_reduction_time_piezo(const ExperimentConfig& c) {
    auto Amax = size_piezo_area_max(c).si();
    auto p = piezo_params(c, c.kind == ExperimentKind::delayed_two_state);
    const auto& k = kConstants;
    auto choice = choose_branch(p.A, Amax);
    double t = 0;
    switch (choice.branch) {
        case ApproxBranch::small_area:
            t = 6.0 * k.hbar / (kPi * k.G * p.d * p.rho_p * p.rho_p * p.f * p.d33 * p.d33 * p.V * p.V * p.A);
            break;
        case ApproxBranch::near_area_max:
            t = 2.0 * std::sqrt(9.0 * k.hbar * k.eps0 * p.R_d * p.eps_r / (kPi * k.G * p.f)) /
                (p.d * p.rho_p * p.d33 * p.V);
            break;
        case ApproxBranch::large_area:
            t = std::cbrt(18.0 * k.hbar * k.eps0 * k.eps0 * p.eps_r * p.eps_r * p.R_d * p.R_d * p.A /
                          (kPi * k.G * p.rho_p * p.rho_p * p.f * p.d33 * p.d33 * p.V * p.V)) /
                p.d;
            break;
    }
    return {seconds(t), choice.branch, choice.warnings};
}

Length approx_displacement_piezo(const ExperimentConfig& c) {
    auto Amax = size_piezo_area_max(c).si();
    auto p = piezo_params(c, c.kind == ExperimentKind::delayed_two_state);
    const auto& k = kConstants;
    if (choose_branch(p.A, Amax).branch != ApproxBranch::large_area) return meters(p.d33 * p.V / 2.0);
    return meters(std::cbrt(9.0 * k.hbar * p.d33 * p.V /
                            (4.0 * kPi * k.G * k.eps0 * p.eps_r * p.rho_p * p.rho_p * p.f * p.R_d * p.A * p.A)));
}

ApproxPlates approx_movable_plates(const ExperimentConfig& c) {
    c.validate();
    const auto& k = kConstants;
    double d = c.gap.si(), dm = c.plate_thickness.si(), A = c.area.si(), V = c.diode2.V_E.si();
    double rho_m = c.plate_material.rho.si();
    double t = std::pow(5.0 * k.hbar * std::pow(d, 4) * dm / (kPi * k.G * k.eps0 * k.eps0 * A * std::pow(V, 4)),
                        0.2);
    double s = std::pow(25.0 * k.eps0 * k.hbar * k.hbar * V * V /
                            (32.0 * kPi * kPi * k.G * k.G * d * d * dm * dm * dm * A * A),
                        0.2) /
               rho_m;
    return {seconds(t), meters(s)};
}

Resistance choose_resistor(const ExperimentConfig& c0, double target_ratio) {
    c0.validate();
    if (!is_piezo_kind(c0.kind)) throw DomainError("choose_resistor needs a piezo capacitor setup");
    if (!(target_ratio > 0)) throw DomainError("target ratio must be positive");
    ExperimentConfig c = c0;
    const double Cp = effective_attenuation(c) * piezo_capacitance(c).si();
    const double V1 = c.diode1.V_E.si(), V2 = c.diode2.V_E.si();
    const double Rd1 = c.diode1.R_d.si(), Rd2 = c.diode2.R_d.si();

    auto solve_R = [&](double t) {
        auto g = [&](double R) {
            return V2 * -std::expm1(-t / (Rd2 * Cp)) - target_ratio * V1 * -std::expm1(-t / ((Rd1 + R) * Cp));
        };
        if (g(0.0) >= 0) {
            double r0 = V2 * -std::expm1(-t / (Rd2 * Cp)) / (V1 * -std::expm1(-t / (Rd1 * Cp)));
            throw DomainError("voltage ratio " + fmt_num(target_ratio) +
                              " is unreachable: with R = 0 the ratio is already " + fmt_num(r0) +
                              " and it only grows with R");
        }
        double lo = 0, hi = 1000.0;
        for (int k = 0; g(hi) < 0; ++k) {
            lo = hi;
            hi *= 2;
            if (k > 200) throw ConvergenceError("no resistance reaches the target ratio", 1.0);
        }
        while (hi - lo > 1e-12 * hi) {
            double mid = 0.5 * (lo + hi);
            (g(mid) < 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    SolverOptions opt;
    opt.include_short_distance = c.include_short_distance;
    opt.horizon = c.horizon;
    double t = approx_reduction_time_piezo(c).t_bar.si();
    double R = solve_R(t);
    for (int iter = 0; iter < 50; ++iter) {
        c.R_series = ohms(R);
        t = find_reduction_time(build_scenario(c), opt).si();
        double R_new = solve_R(t);
        if (std::abs(R_new - R) < 1e-3 * R_new) return ohms(R_new);
        R = R_new;
    }
    throw ConvergenceError("resistor iteration did not settle to 0.1%", 1.0);
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
    c.validate();
    ExperimentReport rep;
    rep.config = c;
    auto s = build_scenario(c);
    SolverOptions opt;
    opt.include_short_distance = c.include_short_distance;
    opt.horizon = c.horizon;
    rep.result = solve_reduction(s, opt);
    const auto& R = rep.result;

    rep.I2 = s.intensities[2];
    rep.p2 = R.p2_overall;
    if (c.kind == ExperimentKind::reference_aperture) {
        if (std::abs(rep.p2 - rep.I2) > 1e-9)
            rep.warnings.push_back("two-state pipeline deviates from Born's rule by " +
                                   fmt_num(rep.p2 - rep.I2));
        rep.p2 = rep.I2;
    }
    rep.p2_over_I2 = rep.I2 > 0 ? rep.p2 / rep.I2 : 0.0;
    rep.ds1 = s.profiles[1].at(R.t_bar_c);
    rep.ds2 = s.profiles[2].at(R.t_bar_c);
    double sigma = s.solid.sigma_n().si();
    rep.decorrelation_margin = rep.ds1.si() / (6.0 * sigma);
    rep.decorrelated = rep.ds1.si() > 6.0 * sigma;
    rep.detector_share = detector_action_budget(c.budget, R.t_bar_c).si() / kConstants.hbar;
    rep.detector_negligible = detector_action_negligible(detector_action_budget(c.budget, R.t_bar_c));
    rep.p_dark_count = dark_count_probability(c.diode2.f_DC, c.t_connected);

    if (is_piezo_kind(c.kind)) {
        rep.C_p = piezo_capacitance(c);
        rep.readout_dV = c.C_bias ? readout_voltage_drop(c.diode2.V_E, *c.C_bias, *rep.C_p) : Voltage{};
        if (c.kind != ExperimentKind::delayed_two_state) {
            rep.approx_time = approx_reduction_time_piezo(c);
            rep.approx_ds2 = approx_displacement_piezo(c);
        }
    }

    for (auto& w : s.solid.warnings()) rep.warnings.push_back(w);
    for (auto& w : R.warnings) rep.warnings.push_back(w);
    if (rep.approx_time)
        for (auto& w : rep.approx_time->warnings) rep.warnings.push_back(w);
    if (c.t_q && R.t_bar_c > *c.t_q)
        rep.warnings.push_back("reduction time exceeds the latching time t_q; charging would have "
                               "stopped earlier");
    if (!rep.decorrelated && c.kind != ExperimentKind::reference_aperture)
        rep.warnings.push_back("states 0 and 1 are not decorrelated at the reduction time");
    if (!rep.detector_negligible)
        rep.warnings.push_back("detector components contribute a non-negligible action");
    return rep;
}

Time delayed_two_state_time(const ExperimentConfig& c0) {
    ExperimentConfig c = c0;
    c.kind = ExperimentKind::delayed_two_state;
    auto full = build_scenario(c);
    ScenarioSet s;
    s.solid = full.solid;
    s.detector_budget = full.detector_budget;
    s.intensities = {full.intensities[0] + full.intensities[2], full.intensities[1]};
    s.profiles = {DisplacementProfile::zero(), full.profiles[1]};
    SolverOptions opt;
    opt.include_short_distance = c.include_short_distance;
    opt.horizon = c.horizon;
    return find_reduction_time(s, opt);
}

DelayedCurve delayed_two_state_curve(const ExperimentConfig& c0, const std::vector<Time>& delays) {
    if (c0.kind != ExperimentKind::delayed_two_state)
        throw DomainError("delayed curve needs experiment.kind = delayed-two-state");
    c0.validate();
    DelayedCurve out;
    out.t_bar_01 = delayed_two_state_time(c0);
    auto base = build_scenario(c0);
    out.I2 = base.intensities[2];

    Length ds1 = base.profiles[1].at(out.t_bar_01);
    Length ds2_full = displacement_from_voltage(*c0.piezo_material.d33, c0.V2_charge);
    if (ds2_full.si() < 4.0 * ds1.si())
        out.warnings.push_back("charged displacement of state 2 is below 4x the (0,1) displacement "
                               "at the two-state reduction time");

    SolverOptions opt;
    opt.include_short_distance = c0.include_short_distance;
    opt.horizon = c0.horizon;
    for (Time d : delays) {
        if (d.si() < 0) throw DomainError("delays must be non-negative");
        if (d >= out.t_bar_01) {
            out.points.push_back({d, out.I2, true});
            continue;
        }
        ExperimentConfig c = c0;
        c.delay = d;
        auto r = solve_reduction(build_scenario(c), opt);
        out.points.push_back({d, r.p2_overall, false});
    }
    return out;
}

SignallingChain signalling_chain(double p_QE2, double p_QE1) {
    if (!(p_QE2 >= 0 && p_QE2 <= 1) || !(p_QE1 >= 0 && p_QE1 <= 1))
        throw DomainError("quantum efficiencies must lie in [0, 1]");
    SignallingChain s{};
    s.p_H2 = p_QE2 / 2.0;
    s.p_H0 = 0.5 - s.p_H2;
    s.p_V1 = p_QE1 / 2.0;
    s.p_V0 = 0.5 - s.p_V1;
    double den = 1.0 + s.p_H2;
    s.p_H2n = 2.0 * s.p_H2 / den;
    s.p_H0n = s.p_H0 / den;
    s.p_V1n = s.p_V1 / den;
    s.p_V0n = s.p_V0 / den;
    s.ratio = (s.p_H2n + s.p_H0n) / (s.p_V1n + s.p_V0n);
    return s;
}

double signalling_ratio(double p_QE2) {
    auto s = signalling_chain(p_QE2);
    if (std::abs(s.ratio - (1.0 + p_QE2)) > 1e-12)
        throw Error("signalling chain disagrees with 1 + p_QE2");
    return s.ratio;
}

Length signalling_arm_margin(Time t_bar_c) {
    if (t_bar_c.si() < 0) throw DomainError("t_bar_c must be non-negative");
    return meters(kConstants.c * t_bar_c.si());
}

}  // namespace dpcollapse
