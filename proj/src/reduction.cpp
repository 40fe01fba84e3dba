#include "dpcollapse/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dpcollapse {

SquareTable::SquareTable(int size) : n(size) {
    if (size < 0 || size > kMaxStates)
        throw DomainError("at most " + std::to_string(kMaxStates) + " states are supported (got " +
                          std::to_string(size) + ")");
}

namespace {

void check_intensities(const std::vector<double>& I) {
    if (I.size() < 2 || I.size() > std::size_t(kMaxStates))
        throw DomainError("superpositions of 2 or 3 states are supported (got " +
                          std::to_string(I.size()) + "); larger superpositions are not modelled");
    double sum = 0;
    for (double x : I) {
        if (!(x >= 0)) throw DomainError("intensities must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DomainError("intensities must sum to 1");
}

void check_pair_table(const PairTable& t, const char* what) {
    for (int i = 0; i < t.n; ++i) {
        for (int j = 0; j < t.n; ++j) {
            double a = t(i, j), b = t(j, i);
            if (!(a >= 0)) throw DomainError(std::string(what) + " table must be non-negative");
            if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)))
                throw DomainError(std::string(what) + " table must be symmetric");
        }
    }
}

struct Sym2 {
    double hi, lo;
    std::array<double, 2> vec;   // unit eigenvector of hi
    bool degenerate;
};

Sym2 solve_sym2(double a, double b, double d) {
    double mean = 0.5 * (a + d);
    double rad = std::hypot(0.5 * (a - d), b);
    Sym2 r{mean + rad, mean - rad, {1.0, 0.0}, false};
    double scale = std::max({std::abs(a), std::abs(b), std::abs(d)});
    if (rad <= 1e-10 * scale || scale == 0.0) {
        r.degenerate = true;
        return r;
    }
    std::array<double, 2> v1{b, r.hi - a}, v2{r.hi - d, b};
    auto& v = (std::hypot(v1[0], v1[1]) >= std::hypot(v2[0], v2[1])) ? v1 : v2;
    double nv = std::hypot(v[0], v[1]);
    r.vec = {v[0] / nv, v[1] / nv};
    return r;
}

// Symmetric form of M restricted to states with positive intensity, plus an
// orthonormal basis of the complement of sqrt(I), on which the zero mode of M
// (columns summing to zero) is removed.
struct Reduced {
    std::vector<int> idx;
    std::array<std::array<double, 3>, 3> B{};
    std::vector<std::array<double, 3>> basis;
};

Reduced reduce(const ReconfigurationMatrix& M, const std::vector<double>& I) {
    if (int(I.size()) != M.n()) throw DomainError("matrix and intensity sizes differ");
    Reduced r;
    for (int i = 0; i < M.n(); ++i)
        if (I[std::size_t(i)] > 0) r.idx.push_back(i);
    const int m = int(r.idx.size());
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            int i = r.idx[std::size_t(a)], j = r.idx[std::size_t(b)];
            r.B[a][b] = M.entries(i, j) * std::sqrt(I[std::size_t(j)] / I[std::size_t(i)]);
        }
    }
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) r.B[a][b] = r.B[b][a] = 0.5 * (r.B[a][b] + r.B[b][a]);

    std::array<double, 3> u{};
    double nu = 0;
    for (int a = 0; a < m; ++a) {
        u[a] = std::sqrt(I[std::size_t(r.idx[std::size_t(a)])]);
        nu += u[a] * u[a];
    }
    nu = std::sqrt(nu);
    for (int a = 0; a < m; ++a) u[a] /= nu;

    if (m == 2) {
        r.basis.push_back({-u[1], u[0], 0.0});
    } else if (m == 3) {
        int k = 0;
        for (int a = 1; a < 3; ++a)
            if (std::abs(u[a]) < std::abs(u[k])) k = a;
        std::array<double, 3> q1{};
        q1[k] = 1.0;
        for (int a = 0; a < 3; ++a) q1[a] -= u[k] * u[a];
        double n1 = std::sqrt(q1[0] * q1[0] + q1[1] * q1[1] + q1[2] * q1[2]);
        for (auto& x : q1) x /= n1;
        std::array<double, 3> q2{u[1] * q1[2] - u[2] * q1[1], u[2] * q1[0] - u[0] * q1[2],
                                 u[0] * q1[1] - u[1] * q1[0]};
        r.basis.push_back(q1);
        r.basis.push_back(q2);
    }
    return r;
}

double quad_form(const Reduced& r, const std::array<double, 3>& x, const std::array<double, 3>& y) {
    double s = 0;
    const int m = int(r.idx.size());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) s += x[a] * r.B[a][b] * y[b];
    return s;
}

}  // namespace

ReconfigurationMatrix build_matrix(const PairTable& S, const std::vector<double>& I) {
    check_intensities(I);
    if (S.n != int(I.size())) throw DomainError("action table and intensity sizes differ");
    check_pair_table(S, "action");
    ReconfigurationMatrix M{SquareTable(S.n)};
    for (int i = 0; i < S.n; ++i) {
        double diag = 0;
        for (int j = 0; j < S.n; ++j) {
            if (j == i) continue;
            diag += S(i, j) * I[std::size_t(j)];
            M.entries(i, j) = -S(i, j) * I[std::size_t(i)];
        }
        M.entries(i, i) = diag;
    }
    return M;
}

std::vector<double> eigenvalues(const ReconfigurationMatrix& M, const std::vector<double>& I) {
    auto r = reduce(M, I);
    std::vector<double> ev;
    if (r.idx.empty()) return ev;
    ev.push_back(0.0);
    if (r.basis.size() == 1) {
        ev.push_back(quad_form(r, r.basis[0], r.basis[0]));
    } else if (r.basis.size() == 2) {
        auto s = solve_sym2(quad_form(r, r.basis[0], r.basis[0]), quad_form(r, r.basis[0], r.basis[1]),
                            quad_form(r, r.basis[1], r.basis[1]));
        ev.push_back(s.lo);
        ev.push_back(s.hi);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

Eigenpair largest_eigenpair(const ReconfigurationMatrix& M, const std::vector<double>& I) {
    auto r = reduce(M, I);
    const int n = M.n();
    Eigenpair out;
    out.vector.assign(std::size_t(n), 0.0);
    if (r.basis.empty()) {
        out.near_degenerate = true;
        return out;
    }

    std::array<double, 3> w{};
    if (r.basis.size() == 1) {
        w = r.basis[0];
        out.value = quad_form(r, w, w);
        double scale = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(M.entries(i, j)));
        out.near_degenerate = !(out.value > 1e-10 * scale) || scale == 0.0;
    } else {
        const auto& q1 = r.basis[0];
        const auto& q2 = r.basis[1];
        auto s = solve_sym2(quad_form(r, q1, q1), quad_form(r, q1, q2), quad_form(r, q2, q2));
        out.value = s.hi;
        out.near_degenerate = s.degenerate;
        for (int a = 0; a < 3; ++a) w[a] = s.vec[0] * q1[a] + s.vec[1] * q2[a];
    }

    double norm = 0;
    for (std::size_t a = 0; a < r.idx.size(); ++a) {
        int i = r.idx[a];
        double v = std::sqrt(I[std::size_t(i)]) * w[a];
        out.vector[std::size_t(i)] = v;
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm > 0)
        for (auto& v : out.vector) v /= norm;

    // orientation: positive on the state with the largest total pairwise action
    std::vector<double> total(std::size_t(n), 0.0);
    for (int i : r.idx)
        for (int j = 0; j < n; ++j)
            if (j != i) total[std::size_t(i)] += -M.entries(i, j) / I[std::size_t(i)];
    std::vector<int> order(r.idx);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return total[std::size_t(a)] > total[std::size_t(b)]; });
    for (int i : order) {
        double v = out.vector[std::size_t(i)];
        if (v == 0.0) continue;
        if (v < 0)
            for (auto& x : out.vector) x = -x;
        break;
    }
    return out;
}

ComponentBudget ComponentBudget::defaults() {
    return {{{"bias-capacitors", seconds(0.1)},
             {"resistor", seconds(1.0)},
             {"photodiode1", seconds(1.0)},
             {"photodiode2", seconds(1.0)},
             {"wires", seconds(1e7)}}};
}

void ComponentBudget::validate() const {
    for (const auto& [name, T] : components)
        if (!(T.si() > 0))
            throw DomainError("component '" + name + "' needs a positive characteristic lifetime");
}

Action detector_action_budget(const ComponentBudget& budget, Time t_bar) {
    if (t_bar.si() < 0) throw DomainError("t_bar must be non-negative");
    budget.validate();
    double s = 0;
    for (const auto& c : budget.components) s += t_bar.si() / c.second.si();
    return joule_seconds(kConstants.hbar * s);
}

void ScenarioSet::validate() const {
    check_intensities(intensities);
    if (profiles.size() != intensities.size())
        throw DomainError("one displacement profile per state is required");
    int positive = 0;
    for (double x : intensities)
        if (x > 0) ++positive;
    if (positive < 2) throw DomainError("at least two states need nonzero intensity");
    bool any = false;
    for (const auto& p : profiles)
        if (!p.is_zero()) any = true;
    if (!any) throw DomainError("at least one state must be displaced");
    detector_budget.validate();
}

PairTable action_table(const ScenarioSet& s, Time t, const SolverOptions& opt) {
    PairTable S(s.size());
    for (int i = 0; i < s.size(); ++i) {
        for (int j = i + 1; j < s.size(); ++j) {
            double v = competition_action(s.solid, s.profiles[std::size_t(i)], s.profiles[std::size_t(j)], t,
                                          opt.include_short_distance, opt.action)
                           .si();
            S(i, j) = S(j, i) = v;
        }
    }
    return S;
}

PairTable energy_table(const ScenarioSet& s, Time t, bool include_short_distance, bool* blended) {
    PairTable E(s.size());
    for (int i = 0; i < s.size(); ++i) {
        for (int j = i + 1; j < s.size(); ++j) {
            double v = pair_energy(s.solid, s.profiles[std::size_t(i)], s.profiles[std::size_t(j)], t,
                                   include_short_distance, blended)
                           .si();
            E(i, j) = E(j, i) = v;
        }
    }
    return E;
}

PairTable displacement_table(const ScenarioSet& s, Time t) {
    PairTable D(s.size());
    for (int i = 0; i < s.size(); ++i) {
        for (int j = i + 1; j < s.size(); ++j) {
            double v = std::abs((s.profiles[std::size_t(i)].at(t) - s.profiles[std::size_t(j)].at(t)).si());
            D(i, j) = D(j, i) = v;
        }
    }
    return D;
}

Action e_max(const ScenarioSet& s, Time t, const SolverOptions& opt) {
    auto M = build_matrix(action_table(s, t, opt), s.intensities);
    return joule_seconds(largest_eigenpair(M, s.intensities).value);
}

Time find_reduction_time(const ScenarioSet& s, const SolverOptions& opt) {
    s.validate();
    const double hbar = kConstants.hbar;
    const double horizon = opt.horizon.si();
    if (!(horizon > 0)) throw DomainError("horizon must be positive");
    // quadrature noise sets how much apparent decrease is tolerated
    const double noise = 10.0 * opt.action.rel_tol + 1e-12;

    std::vector<std::pair<double, double>> samples;
    auto g = [&](double t) {
        double v = e_max(s, seconds(t), opt).si();
        if (opt.include_detectors) v += detector_action_budget(s.detector_budget, seconds(t)).si();
        v = v / hbar - 1.0;
        for (const auto& [ts, gs] : samples) {
            if ((ts < t && gs > v + noise) || (ts > t && gs < v - noise)) {
                std::ostringstream m;
                m << "reduction condition is not monotone in t: " << gs + 1 << " hbar at t = " << ts
                  << " s vs " << v + 1 << " hbar at t = " << t << " s";
                throw MonotonicityError(m.str());
            }
        }
        samples.emplace_back(t, v);
        return v;
    };

    double lo = 0, hi = std::min(opt.initial_guess.si(), horizon);
    if (!(hi > 0)) hi = horizon * 1e-9;
    if (g(hi) < 0) {
        for (;;) {
            lo = hi;
            if (hi >= horizon) {
                std::ostringstream m;
                m << "no reduction within horizon of " << horizon << " s (e_max + detectors = "
                  << samples.back().second + 1 << " hbar)";
                throw NoReductionError(m.str());
            }
            hi = std::min(2 * hi, horizon);
            if (g(hi) >= 0) break;
        }
    } else {
        for (int k = 0;; ++k) {
            double t = 0.5 * hi;
            if (k > 2000 || t == 0) throw DomainError("reduction condition holds at t -> 0");
            if (g(t) < 0) {
                lo = t;
                break;
            }
            hi = t;
        }
    }
    while (hi - lo > opt.rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) >= 0)
            hi = mid;
        else
            lo = mid;
    }
    return seconds(0.5 * (lo + hi));
}

std::vector<double> decay_trigger_rates(const PairTable& E, const std::vector<double>& I) {
    if (E.n != int(I.size())) throw DomainError("energy table and intensity sizes differ");
    check_pair_table(E, "energy");
    std::vector<double> r(I.size(), 0.0);
    for (int i = 0; i < E.n; ++i)
        for (int j = 0; j < E.n; ++j)
            if (j != i) r[std::size_t(i)] += I[std::size_t(j)] * E(i, j);
    for (auto& x : r) x /= kConstants.hbar;
    return r;
}

std::vector<std::vector<int>> decorrelation_groups(const PairTable& D, Length sigma_n) {
    const int n = D.n;
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)];
        return x;
    };
    const double limit = 6.0 * sigma_n.si();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (D(i, j) <= limit) {
                int a = find(i), b = find(j);
                if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(std::size_t(n), -1);
    for (int i = 0; i < n; ++i) {
        int root = find(i);
        if (slot[std::size_t(root)] < 0) {
            slot[std::size_t(root)] = int(groups.size());
            groups.emplace_back();
        }
        groups[std::size_t(slot[std::size_t(root)])].push_back(i);
    }
    return groups;
}

RuleResult apply_reconfiguration_rule(const std::vector<double>& I, const std::vector<double>& dI,
                                      const std::vector<double>& rates,
                                      const std::vector<std::vector<int>>& groups) {
    const std::size_t n = I.size();
    if (dI.size() != n || rates.size() != n) throw DomainError("rule inputs differ in size");
    double sum = 0, scale = 0;
    for (double x : dI) {
        sum += x;
        scale = std::max(scale, std::abs(x));
    }
    if (!(scale > 0)) throw DomainError("reconfiguration solution is zero");
    if (std::abs(sum) > 1e-10 * std::max(scale, 1.0))
        throw DomainError("reconfiguration solution must sum to zero");
    for (double r : rates)
        if (!(r >= 0)) throw DomainError("decay-trigger rates must be non-negative");

    RuleResult out;
    double ap = INFINITY, am = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        if (dI[i] < 0) ap = std::min(ap, I[i] / -dI[i]);
        if (dI[i] > 0) am = std::min(am, I[i] / dI[i]);
    }
    out.alpha_plus = ap;
    out.alpha_minus = am;
    auto finish = [&](double alpha, double sign) {
        std::vector<double> v(n);
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = I[i] + sign * alpha * dI[i];
            if (v[i] < 1e-12) v[i] = 0.0;
            total += v[i];
        }
        for (auto& x : v) x /= total;
        return v;
    };
    out.I_plus = finish(ap, +1.0);
    out.I_minus = finish(am, -1.0);

    double pp = 0, pm = 0;
    for (const auto& g : groups) {
        double best_p = 0, best_m = 0;
        for (int i : g) {
            if (i < 0 || std::size_t(i) >= n) throw DomainError("group refers to an unknown state");
            if (dI[std::size_t(i)] < 0) best_p = std::max(best_p, rates[std::size_t(i)]);
            if (dI[std::size_t(i)] > 0) best_m = std::max(best_m, rates[std::size_t(i)]);
        }
        pp += best_p;
        pm += best_m;
    }
    if (!(pp + pm > 0)) throw Error("no decay triggers: all decay-trigger rates are zero");
    out.p_plus = pp / (pp + pm);
    out.p_minus = pm / (pp + pm);
    return out;
}

double overall_p2(double p_plus, const std::vector<double>& I_plus, double p_minus,
                  const std::vector<double>& I_minus, int state) {
    if (I_plus.size() != I_minus.size() || I_plus.empty())
        throw DomainError("final intensity vectors differ in size");
    std::size_t k = state < 0 ? I_plus.size() - 1 : std::size_t(state);
    if (k >= I_plus.size()) throw DomainError("state index out of range");
    return p_plus * I_plus[k] + p_minus * I_minus[k];
}

double born_limit_p2(double I2, bool decorrelated) {
    if (!(I2 >= 0 && I2 <= 1)) throw DomainError("I2 must lie in [0, 1]");
    return decorrelated ? 2.0 * I2 / (1.0 + I2) : I2;
}

namespace {

// Intensity-weighted pair table between groups.
PairTable merge_table(const PairTable& t, const std::vector<std::vector<int>>& groups,
                      const std::vector<double>& I, const std::vector<double>& IG) {
    const int m = int(groups.size());
    PairTable out(m);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            double s = 0;
            for (int i : groups[std::size_t(a)])
                for (int j : groups[std::size_t(b)]) s += I[std::size_t(i)] * I[std::size_t(j)] * t(i, j);
            double w = IG[std::size_t(a)] * IG[std::size_t(b)];
            out(a, b) = out(b, a) = w > 0 ? s / w : 0.0;
        }
    }
    return out;
}

std::string group_text(const std::vector<int>& g) {
    std::string s = "{";
    for (std::size_t k = 0; k < g.size(); ++k) s += (k ? "," : "") + std::to_string(g[k]);
    return s + "}";
}

}  // namespace

ReductionResult solve_reduction(const ScenarioSet& s, const SolverOptions& opt) {
    s.validate();
    ReductionResult R;
    const auto& I = s.intensities;
    const int n = s.size();
    R.intensities = I;
    R.t_bar_c = find_reduction_time(s, opt);

    bool blended = false;
    R.actions = action_table(s, R.t_bar_c, opt);
    R.energies = energy_table(s, R.t_bar_c, opt.include_short_distance, &blended);
    R.displacements = displacement_table(s, R.t_bar_c);
    if (blended)
        R.warnings.push_back(
            "a displacement at the reduction time lies between sigma_n and 4 sigma_n, where the "
            "short-distance energy is interpolated");

    auto M = build_matrix(R.actions, I);
    auto eig = largest_eigenpair(M, I);
    R.e_max = joule_seconds(eig.value);
    R.detector_action = opt.include_detectors ? detector_action_budget(s.detector_budget, R.t_bar_c)
                                              : Action{};
    if (eig.near_degenerate)
        R.warnings.push_back("largest eigenvalue is nearly degenerate; eigenvector chosen by state order");
    R.rates = decay_trigger_rates(R.energies, I);

    R.groups = decorrelation_groups(R.displacements, s.solid.sigma_n());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (R.displacements(i, j) > 6.0 * s.solid.sigma_n().si()) R.decorrelated_pairs.emplace_back(i, j);

    bool merged = false;
    for (const auto& g : R.groups)
        if (g.size() > 1) merged = true;

    if (!merged) {
        R.dI_c = eig.vector;
        auto rule = apply_reconfiguration_rule(I, R.dI_c, R.rates, R.groups);
        R.I_plus = rule.I_plus;
        R.I_minus = rule.I_minus;
        R.alpha_plus = rule.alpha_plus;
        R.alpha_minus = rule.alpha_minus;
        R.p_plus = rule.p_plus;
        R.p_minus = rule.p_minus;
    } else {
        const int m = int(R.groups.size());
        std::vector<double> IG(std::size_t(m), 0.0);
        for (int a = 0; a < m; ++a)
            for (int i : R.groups[std::size_t(a)]) IG[std::size_t(a)] += I[std::size_t(i)];
        std::string names;
        for (const auto& g : R.groups)
            if (g.size() > 1) names += (names.empty() ? "" : ", ") + group_text(g);
        R.warnings.push_back("states " + names +
                             " are correlated at the reduction time and are reconfigured as one "
                             "state");

        std::vector<double> dG, IpG, ImG;
        int positive_groups = 0;
        for (double x : IG)
            if (x > 0) ++positive_groups;
        if (m == 1 || positive_groups < 2) {
            // nothing left to compete: Born's rule
            dG.assign(std::size_t(m), 0.0);
            IpG = ImG = IG;
            R.p_plus = 1.0;
            R.p_minus = 0.0;
        } else {
            auto SG = merge_table(R.actions, R.groups, I, IG);
            auto EG = merge_table(R.energies, R.groups, I, IG);
            auto eg = largest_eigenpair(build_matrix(SG, IG), IG);
            dG = eg.vector;
            std::vector<std::vector<int>> singles;
            for (int a = 0; a < m; ++a) singles.push_back({a});
            auto rule = apply_reconfiguration_rule(IG, dG, decay_trigger_rates(EG, IG), singles);
            IpG = rule.I_plus;
            ImG = rule.I_minus;
            R.alpha_plus = rule.alpha_plus;
            R.alpha_minus = rule.alpha_minus;
            R.p_plus = rule.p_plus;
            R.p_minus = rule.p_minus;
        }
        R.dI_c.assign(std::size_t(n), 0.0);
        R.I_plus.assign(std::size_t(n), 0.0);
        R.I_minus.assign(std::size_t(n), 0.0);
        double norm = 0;
        for (int a = 0; a < m; ++a) {
            for (int i : R.groups[std::size_t(a)]) {
                double share = IG[std::size_t(a)] > 0 ? I[std::size_t(i)] / IG[std::size_t(a)] : 0.0;
                R.dI_c[std::size_t(i)] = dG[std::size_t(a)] * share;
                R.I_plus[std::size_t(i)] = IpG[std::size_t(a)] * share;
                R.I_minus[std::size_t(i)] = ImG[std::size_t(a)] * share;
                norm += R.dI_c[std::size_t(i)] * R.dI_c[std::size_t(i)];
            }
        }
        if (norm > 0)
            for (auto& x : R.dI_c) x /= std::sqrt(norm);
    }

    R.p_final.resize(std::size_t(n));
    for (int k = 0; k < n; ++k)
        R.p_final[std::size_t(k)] = overall_p2(R.p_plus, R.I_plus, R.p_minus, R.I_minus, k);
    R.p2_overall = R.p_final.back();
    return R;
}

}  // namespace dpcollapse
