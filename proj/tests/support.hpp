#pragma once

// Scenario builders and independent reference computations shared by the
// unit, property and acceptance tests. Nothing here calls the library's
// eigen-solver or root finder.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "dpcollapse/experiments.hpp"

namespace testsupport {

using namespace dpcollapse;

inline const Material& aluminium() { return MaterialDatabase::standard().get("aluminium"); }

/// Aluminium plate large enough that millisecond-scale reductions need
/// only nanometre displacements.
inline SolidSpec test_plate() {
    return SolidSpec{{PlateSpec{PlateKind::displaced, square_meters(4e-6), meters(1e-4), aluminium()}}};
}

/// Constant displacements (0, ds1, ds2): energies are time independent, so
/// every action is E t.
inline ScenarioSet constant_scenario(std::vector<double> I, double ds1, double ds2) {
    ScenarioSet s;
    s.intensities = std::move(I);
    s.profiles = {DisplacementProfile::zero(), DisplacementProfile::constant(meters(ds1))};
    if (s.intensities.size() == 3) s.profiles.push_back(DisplacementProfile::constant(meters(ds2)));
    s.solid = test_plate();
    s.detector_budget = ComponentBudget{};
    return s;
}

inline SolverOptions long_distance_only() {
    SolverOptions o;
    o.include_short_distance = false;
    o.include_detectors = false;
    return o;
}

/// Eigenvalues of a symmetric 3x3 (or 2x2 in the top-left corner) by cyclic
/// Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(std::array<std::array<double, 3>, 3> a, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (a[p][q] == 0) continue;
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev;
    for (int i = 0; i < n; ++i) ev.push_back(a[i][i]);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Spectrum of D^-1/2 (M D) D^-1/2 built directly from the actions:
/// entries sqrt(I_i I_j) times the reconfiguration-matrix structure.
inline std::vector<double> symmetrized_spectrum(const PairTable& S, const std::vector<double>& I) {
    const int n = int(I.size());
    std::array<std::array<double, 3>, 3> a{};
    for (int i = 0; i < n; ++i) {
        double diag = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) diag += S(i, j) * I[std::size_t(j)];
        a[i][i] = diag;
        for (int j = 0; j < n; ++j)
            if (j != i) a[i][j] = -S(i, j) * std::sqrt(I[std::size_t(i)] * I[std::size_t(j)]);
    }
    return jacobi_eigenvalues(a, n);
}

/// Smallest t with f(t) >= target for an increasing f, by doubling and
/// bisection. Independent of the library's root finder.
template <class F>
double solve_increasing(F f, double target, double t0 = 1e-9, double rel = 1e-12) {
    double lo = 0, hi = t0;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > rel * hi) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Lifetime of the (0,1) superposition from the pair action alone: states 0
/// and 2 share the undisplaced geometry, so the 2x2 largest eigenvalue is
/// S01 (I0 + I2 + I1) = S01.
inline double independent_t01(const ExperimentConfig& c) {
    const double hbar = 1.054571817e-34;
    auto s = build_scenario(c);
    auto f = [&](double t) {
        double S = competition_action(s.solid, s.profiles[0], s.profiles[1], seconds(t), c.include_short_distance).si();
        return S + detector_action_budget(s.detector_budget, seconds(t)).si();
    };
    return solve_increasing(f, hbar);
}

}  // namespace testsupport
