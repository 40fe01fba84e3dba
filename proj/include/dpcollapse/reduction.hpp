#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dpcollapse/dynamics.hpp"
#include "dpcollapse/quantities.hpp"

namespace dpcollapse {

inline constexpr int kMaxStates = 3;

/// Small dense n x n table (n <= 3), row major, SI values.
struct SquareTable {
    int n = 0;
    std::array<double, 9> a{};

    SquareTable() = default;
    explicit SquareTable(int size);

    double& operator()(int i, int j) { return a[std::size_t(3 * i + j)]; }
    double operator()(int i, int j) const { return a[std::size_t(3 * i + j)]; }
};

/// Symmetric pairwise table with zero diagonal (actions, energies, displacements).
using PairTable = SquareTable;

struct ReconfigurationMatrix {
    SquareTable entries;   // J s
    int n() const { return entries.n; }
};

/// Diagonal i: sum_{j!=i} S_ij I_j; off-diagonal (i,j): -S_ij I_i.
ReconfigurationMatrix build_matrix(const PairTable& actions, const std::vector<double>& I);

struct Eigenpair {
    double value = 0;              // J s
    std::vector<double> vector;    // unit norm, sums to zero
    bool near_degenerate = false;
};

/// Largest eigenvalue of M and its eigenvector. Zero-intensity states are
/// dropped and come back with a zero component. The eigenvector is oriented
/// positive on the state with the largest total pairwise action.
Eigenpair largest_eigenpair(const ReconfigurationMatrix& M, const std::vector<double>& I);

/// All eigenvalues (ascending) of M restricted to states with I_i > 0.
std::vector<double> eigenvalues(const ReconfigurationMatrix& M, const std::vector<double>& I);

struct ComponentBudget {
    std::vector<std::pair<std::string, Time>> components;

    /// Bias capacitor bank 0.1 s, resistor 1 s, two photodiodes 1 s each, wires 1e7 s.
    static ComponentBudget defaults();
    void validate() const;
};

/// hbar * sum_i t / T_i
Action detector_action_budget(const ComponentBudget& budget, Time t_bar);
inline bool detector_action_negligible(Action s) { return s.si() < 0.01 * kConstants.hbar; }

struct ScenarioSet {
    std::vector<double> intensities;
    std::vector<DisplacementProfile> profiles;   // state 0 is the undisplaced reference
    SolidSpec solid;
    ComponentBudget detector_budget;

    int size() const { return int(intensities.size()); }
    void validate() const;
};

struct SolverOptions {
    bool include_short_distance = true;
    Time horizon = seconds(10.0);
    double rel_tol = 1e-10;
    Time initial_guess = seconds(1e-6);
    ActionOptions action{};
    bool include_detectors = true;
};

PairTable action_table(const ScenarioSet& s, Time t, const SolverOptions& opt);
PairTable energy_table(const ScenarioSet& s, Time t, bool include_short_distance,
                       bool* blended = nullptr);
PairTable displacement_table(const ScenarioSet& s, Time t);

/// Largest eigenvalue of the reconfiguration matrix at t.
Action e_max(const ScenarioSet& s, Time t, const SolverOptions& opt);

/// Smallest t with e_max(t) + detector action(t) = hbar.
Time find_reduction_time(const ScenarioSet& s, const SolverOptions& opt = {});

/// rate_i = (1/hbar) sum_{j!=i} I_j E_ij, in 1/s.
std::vector<double> decay_trigger_rates(const PairTable& energies, const std::vector<double>& I);

/// Partition of states: i, j share a group iff linked by displacements <= 6 sigma_n.
std::vector<std::vector<int>> decorrelation_groups(const PairTable& displacements, Length sigma_n);

struct RuleResult {
    std::vector<double> I_plus, I_minus;
    double alpha_plus = 0, alpha_minus = 0;
    double p_plus = 0, p_minus = 0;
};

/// Final intensities and branch probabilities. Each group counts once per
/// side with the largest rate among its members on that side.
RuleResult apply_reconfiguration_rule(const std::vector<double>& I, const std::vector<double>& dI,
                                      const std::vector<double>& rates,
                                      const std::vector<std::vector<int>>& groups);

/// p_plus I_plus[k] + p_minus I_minus[k]; k defaults to the last state.
double overall_p2(double p_plus, const std::vector<double>& I_plus, double p_minus,
                  const std::vector<double>& I_minus, int state = -1);

/// 2 I2 / (1 + I2) when decorrelated, I2 otherwise.
double born_limit_p2(double I2, bool decorrelated);

struct ReductionResult {
    Time t_bar_c;
    std::vector<double> intensities;
    std::vector<double> dI_c;
    std::vector<double> I_plus, I_minus;
    double alpha_plus = 0, alpha_minus = 0;
    double p_plus = 0, p_minus = 0;
    std::vector<double> p_final;   // overall reduction probability per state
    double p2_overall = 0;         // p_final of the last state

    PairTable actions, energies, displacements;
    std::vector<double> rates;
    std::vector<std::vector<int>> groups;
    std::vector<std::pair<int, int>> decorrelated_pairs;
    Action e_max;
    Action detector_action;
    std::vector<std::string> warnings;
};

/// Full pipeline: reduction time, reconfiguration solution, decorrelation,
/// rule and overall probabilities. States that are correlated at t_bar_c are
/// merged into one intensity-weighted state before the rule is applied.
ReductionResult solve_reduction(const ScenarioSet& s, const SolverOptions& opt = {});

}  // namespace dpcollapse
