#include "dpcollapse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dpcollapse {

DisplacementProfile DisplacementProfile::constant(Length amplitude) {
    if (amplitude.si() < 0) throw DomainError("profile amplitude must be non-negative");
    return DisplacementProfile(Constant{amplitude});
}

DisplacementProfile DisplacementProfile::exponential(Length amplitude, Time tau) {
    if (amplitude.si() < 0) throw DomainError("profile amplitude must be non-negative");
    if (!(tau.si() > 0)) throw DomainError("exponential profile needs tau > 0");
    return DisplacementProfile(Exponential{amplitude, tau});
}

DisplacementProfile DisplacementProfile::quadratic(Acceleration coefficient) {
    if (coefficient.si() < 0) throw DomainError("quadratic coefficient must be non-negative");
    return DisplacementProfile(Quadratic{coefficient});
}

DisplacementProfile DisplacementProfile::linear_ramp(Length amplitude, Time tau) {
    if (amplitude.si() < 0) throw DomainError("profile amplitude must be non-negative");
    if (!(tau.si() > 0)) throw DomainError("linear ramp needs tau > 0");
    return DisplacementProfile(LinearRamp{amplitude, tau});
}

DisplacementProfile DisplacementProfile::delayed(DisplacementProfile inner, Time delay) {
    if (delay.si() < 0) throw DomainError("delay must be non-negative");
    return DisplacementProfile(
        Delayed{std::make_shared<const DisplacementProfile>(std::move(inner)), delay});
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Length DisplacementProfile::at(Time t) const {
    const double s = t.si();
    if (s <= 0) return Length{};
    return std::visit(
        overloaded{
            [](const Zero&) { return Length{}; },
            [](const Constant& c) { return c.amplitude; },
            [s](const Exponential& e) { return e.amplitude * -std::expm1(-s / e.tau.si()); },
            [s](const Quadratic& q) { return meters(q.coefficient.si() * s * s); },
            [s](const LinearRamp& r) { return r.amplitude * (s / r.tau.si()); },
            [t](const Delayed& d) { return d.inner->at(t - d.delay); },
        },
        form_);
}

std::string DisplacementProfile::describe() const {
    std::ostringstream o;
    std::visit(overloaded{
                   [&](const Zero&) { o << "zero"; },
                   [&](const Constant& c) { o << "constant(" << c.amplitude.si() << " m)"; },
                   [&](const Exponential& e) {
                       o << "exponential(" << e.amplitude.si() << " m, tau " << e.tau.si() << " s)";
                   },
                   [&](const Quadratic& q) { o << "quadratic(" << q.coefficient.si() << " m/s2)"; },
                   [&](const LinearRamp& r) {
                       o << "ramp(" << r.amplitude.si() << " m per " << r.tau.si() << " s)";
                   },
                   [&](const Delayed& d) {
                       o << "delayed(" << d.inner->describe() << ", " << d.delay.si() << " s)";
                   },
               },
               form_);
    return o.str();
}

Voltage piezo_voltage_profile(Voltage V_E, Resistance R_series, Capacitance C_p, Time t) {
    if (!(R_series.si() > 0) || !(C_p.si() > 0))
        throw DomainError("charging circuit needs R > 0 and C > 0");
    if (t.si() <= 0) return Voltage{};
    return V_E * -std::expm1(-t.si() / (R_series.si() * C_p.si()));
}

Length displacement_from_voltage(LengthPerVoltage d33, Voltage V) {
    if (V.si() < 0) throw DomainError("voltage must be non-negative");
    return meters(d33.si() * V.si() / 2.0);
}

Length movable_plate_displacement(Voltage V_E, Length d, Length d_m, MassDensity rho_m, Time t) {
    if (!(d.si() > 0) || !(d_m.si() > 0) || !(rho_m.si() > 0))
        throw DomainError("movable plate geometry must be positive");
    if (t.si() <= 0) return Length{};
    double v = V_E.si();
    return meters(kConstants.eps0 * v * v / (2.0 * d.si() * d.si() * d_m.si() * rho_m.si()) *
                  t.si() * t.si());
}

DisplacementProfile piezo_displacement_profile(LengthPerVoltage d33, Voltage V_E,
                                               Resistance R_series, Capacitance C_p) {
    if (!(R_series.si() > 0) || !(C_p.si() > 0))
        throw DomainError("charging circuit needs R > 0 and C > 0");
    return DisplacementProfile::exponential(displacement_from_voltage(d33, V_E),
                                            seconds(R_series.si() * C_p.si()));
}

DisplacementProfile movable_plate_profile(Voltage V_E, Length d, Length d_m, MassDensity rho_m) {
    double v = V_E.si();
    return DisplacementProfile::quadratic(Acceleration::from_si(
        kConstants.eps0 * v * v / (2.0 * d.si() * d.si() * d_m.si() * rho_m.si())));
}

Energy pair_energy(const SolidSpec& solid, const DisplacementProfile& pi,
                   const DisplacementProfile& pj, Time t, bool include_short_distance,
                   bool* blended) {
    return dp_energy_solid(solid, pi.at(t) - pj.at(t), include_short_distance, blended);
}

namespace {

// c * t^n * exp(-rate t), valid for t > 0
struct Term {
    double c;
    int n;
    double rate;
};

bool append_terms(const DisplacementProfile& p, double sign, std::vector<Term>& out) {
    using P = DisplacementProfile;
    return std::visit(overloaded{
                          [](const P::Zero&) { return true; },
                          [&](const P::Constant& c) {
                              out.push_back({sign * c.amplitude.si(), 0, 0.0});
                              return true;
                          },
                          [&](const P::Exponential& e) {
                              out.push_back({sign * e.amplitude.si(), 0, 0.0});
                              out.push_back({-sign * e.amplitude.si(), 0, 1.0 / e.tau.si()});
                              return true;
                          },
                          [&](const P::Quadratic& q) {
                              out.push_back({sign * q.coefficient.si(), 2, 0.0});
                              return true;
                          },
                          [&](const P::LinearRamp& r) {
                              out.push_back({sign * r.amplitude.si() / r.tau.si(), 1, 0.0});
                              return true;
                          },
                          [](const P::Delayed&) { return false; },
                      },
                      p.form());
}

// Exact integral of (sum of terms)^2 over [0, T], or nothing when the terms
// mix polynomial and exponential factors or the exponentials are too flat
// over [0, T] for the expansion to keep its digits.
std::optional<double> closed_form_square_integral(const std::vector<Term>& terms, double T) {
    bool has_exp = false, has_poly = false;
    double max_rate = 0;
    for (const auto& t : terms) {
        if (t.rate > 0) has_exp = true;
        if (t.n > 0) has_poly = true;
        max_rate = std::max(max_rate, t.rate);
    }
    if (has_exp && has_poly) return std::nullopt;
    if (has_exp) {
        double min_rate = max_rate;
        for (const auto& t : terms)
            if (t.rate > 0) min_rate = std::min(min_rate, t.rate);
        if (min_rate * T < 1e-3) return std::nullopt;
    }
    double sum = 0;
    for (const auto& a : terms) {
        for (const auto& b : terms) {
            int n = a.n + b.n;
            double lam = a.rate + b.rate;
            double c = a.c * b.c;
            if (lam == 0.0) {
                sum += c * std::pow(T, n + 1) / (n + 1);
            } else {
                sum += c * -std::expm1(-lam * T) / lam;   // n == 0 here
            }
        }
    }
    return std::max(sum, 0.0);
}

// Switch-on times plus a geometric ladder over each exponential's transient,
// so a long horizon cannot hide the early structure from the first panel.
void collect_breakpoints(const DisplacementProfile& p, double offset, std::vector<double>& out) {
    if (auto* d = std::get_if<DisplacementProfile::Delayed>(&p.form())) {
        out.push_back(offset + d->delay.si());
        collect_breakpoints(*d->inner, offset + d->delay.si(), out);
    } else if (auto* e = std::get_if<DisplacementProfile::Exponential>(&p.form())) {
        for (double m : {0.25, 1.0, 4.0, 16.0, 64.0}) out.push_back(offset + m * e->tau.si());
    }
}

// One G7/K15 panel on [a, b] using Boost's node tables. Boost's own adaptive
// driver compares an unscaled panel error against a scaled tolerance, which
// forces full-depth refinement on short intervals, so the recursion is here.
struct Panel {
    double value, error, l1;
};

template <class F>
Panel gk15(const F& f, double a, double b) {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& x = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
    double f0 = f(mid);
    double k = f0 * wk[0], g = f0 * wg[0], l1 = std::abs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        double fp = f(mid + h * x[i]), fm = f(mid - h * x[i]);
        k += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
    }
    return {h * k, h * std::abs(k - g), h * l1};
}

template <class F>
Panel adaptive_gk15(const F& f, double a, double b, double rel_tol, int depth) {
    Panel p = gk15(f, a, b);
    double floor = 4.0 * std::numeric_limits<double>::epsilon() * p.l1;
    if (depth == 0 || p.error <= std::max(rel_tol * p.l1, floor)) return p;
    double m = 0.5 * (a + b);
    Panel l = adaptive_gk15(f, a, m, rel_tol, depth - 1);
    Panel r = adaptive_gk15(f, m, b, rel_tol, depth - 1);
    return {l.value + r.value, l.error + r.error, l.l1 + r.l1};
}

}  // namespace

Action competition_action(const SolidSpec& solid, const DisplacementProfile& pi,
                          const DisplacementProfile& pj, Time t_bar, bool include_short_distance,
                          const ActionOptions& opt) {
    const double T = t_bar.si();
    if (T < 0) throw DomainError("t_bar must be non-negative");
    if (T == 0) return Action{};

    if (!include_short_distance && !opt.force_quadrature) {
        std::vector<Term> terms;
        if (append_terms(pi, 1.0, terms) && append_terms(pj, -1.0, terms)) {
            if (auto v = closed_form_square_integral(terms, T))
                return joule_seconds(solid.long_distance_coefficient() * *v);
        }
    }

    std::vector<double> cuts{0.0};
    collect_breakpoints(pi, 0.0, cuts);
    collect_breakpoints(pj, 0.0, cuts);
    cuts.push_back(T);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [T](double c) { return c < 0 || c > T; }),
               cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto f = [&](double t) {
        return pair_energy(solid, pi, pj, seconds(t), include_short_distance).si();
    };
    double total = 0, total_err = 0, total_l1 = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Panel p = adaptive_gk15(f, cuts[k], cuts[k + 1], opt.rel_tol, 30);
        total += p.value;
        total_err += p.error;
        total_l1 += p.l1;
    }
    if (total_l1 > 0 && total_err > std::max(opt.rel_tol, 4.0 * std::numeric_limits<double>::epsilon()) * total_l1) {
        throw ConvergenceError("competition action quadrature did not converge (relative error " +
                                   std::to_string(total_err / total_l1) + ")",
                               total_err / total_l1);
    }
    return joule_seconds(total);
}

}  // namespace dpcollapse
