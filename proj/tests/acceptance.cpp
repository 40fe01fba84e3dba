// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcollapse/cli.hpp"
#include "dpcollapse/config.hpp"
#include "property_suites.hpp"

using namespace dpcollapse;
using namespace testsupport;

namespace {

const std::string kDir = DPCOLLAPSE_CONFIG_DIR;
const double hbar = 1.054571817e-34;

struct Check {
    std::vector<std::string> lines;
    bool ok = true;

    void within(const std::string& what, double value, double lo, double hi, const char* unit = "") {
        bool pass = value >= lo && value <= hi;
        ok = ok && pass;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %-34s %.6g%s in [%.6g, %.6g]", pass ? "ok  " : "MISS", what.c_str(),
                      value, unit, lo, hi);
        lines.emplace_back(buf);
    }
    void near(const std::string& what, double value, double target, double tol, const char* unit = "") {
        within(what, value, target - tol, target + tol, unit);
    }
    void below(const std::string& what, double value, double limit, const char* unit = "") {
        bool pass = value < limit;
        ok = ok && pass;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %-34s %.6g%s < %.6g", pass ? "ok  " : "MISS", what.c_str(), value, unit, limit);
        lines.emplace_back(buf);
    }
    void suite(const SuiteResult& r) {
        ok = ok && r.ok();
        char buf[512];
        std::snprintf(buf, sizeof buf, "%s %-58s %4d cases, %d failed, worst %.3g", r.ok() ? "ok  " : "MISS",
                      r.name.c_str(), r.cases, r.failures, r.worst);
        lines.emplace_back(buf);
        if (!r.ok()) lines.push_back("       first failure: " + r.first_failure);
    }
    void info(const std::string& text) { lines.push_back("info " + text); }
};

nlohmann::json reduce_json(std::vector<std::string> args) {
    args.insert(args.begin(), "dpcollapse");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(int(argv.size()), argv.data(), out, err);
    if (code != 0) throw std::runtime_error("dpcollapse exited with " + std::to_string(code) + ": " + err.str());
    return nlohmann::json::parse(out.str())["rows"][0];
}

// ---- criteria ----

void ac1(Check& c) {
    auto row = reduce_json({"reduce", "--config", kDir + "/fig6.cfg", "--format", "json"});
    c.within("t_bar_c", row["t_bar_c"].get<double>() * 1e6, 0.82, 0.86, " us");
    c.within("p2 / I2", row["p2_over_I2"].get<double>(), 1.53, 1.59);
    c.within("ds2(t_bar_c)", row["ds2"].get<double>() * 1e10, 42, 45, " A");
    c.within("ds1(t_bar_c)", row["ds1"].get<double>() * 1e10, 10.4, 11.0, " A");
}

void ac2(Check& c) {
    auto row = reduce_json({"--no-short-distance", "reduce", "--config", kDir + "/fig6.cfg", "--format", "json"});
    c.within("t_bar_c", row["t_bar_c"].get<double>() * 1e6, 0.85, 0.89, " us");
    c.within("p2 / I2", row["p2_over_I2"].get<double>(), 1.46, 1.52);
}

void ac3(Check& c) {
    auto row = reduce_json({"reduce", "--config", kDir + "/fig8.cfg", "--format", "json"});
    c.within("t_bar_c", row["t_bar_c"].get<double>() * 1e6, 96, 100, " us");
    c.within("p2 / I2", row["p2_over_I2"].get<double>(), 1.44, 1.50);
    c.within("ds2(t_bar_c)", row["ds2"].get<double>() * 1e10, 15.3, 16.3, " A");
    c.within("ds1(t_bar_c)", row["ds1"].get<double>() * 1e10, 3.8, 4.1, " A");

    auto text = ConfigText::load(kDir + "/fig8.cfg");
    text.set("model.short_distance", "on");
    auto sd = run_experiment(build_config(text));
    char buf[160];
    std::snprintf(buf, sizeof buf, "with plate short-distance terms: t_bar_c %.4g us, p2/I2 %.4g",
                  sd.result.t_bar_c.si() * 1e6, sd.p2_over_I2);
    c.info(buf);
}

void ac4(Check& c) {
    const std::vector<double> I{0.5, 0.25, 0.25};
    auto r = solve_reduction(constant_scenario(I, 1e-9, 4e-9), long_distance_only());
    c.near("S02 at reduction / hbar", r.actions(0, 2) / hbar, 1.15, 0.01);
    c.near("dI_c[0]", r.dI_c[0], -0.626, 0.002);
    c.near("dI_c[1]", r.dI_c[1], -0.140, 0.002);
    c.near("dI_c[2]", r.dI_c[2], 0.767, 0.002);
    c.near("I+[0]", r.I_plus[0], 0.0, 0.002);
    c.near("I+[1]", r.I_plus[1], 0.138, 0.002);
    c.near("I+[2]", r.I_plus[2], 0.862, 0.002);
    c.near("p+", r.p_plus, 0.406, 0.002);
    c.near("p2 / I2", r.p2_overall / I[2], 1.40, 0.01);
}

double limit_p2(double I2, double ds1, double ratio) {
    double rest = (1 - I2) / 2;
    return solve_reduction(constant_scenario({rest, rest, I2}, ds1, ratio * ds1), long_distance_only()).p2_overall;
}

void ac5(Check& c) {
    const double sigma = aluminium().sigma_n.si();
    for (double I2 : {0.1, 0.21, 0.25, 0.4, 0.6}) {
        double target = 2 * I2 / (1 + I2);
        double p2 = limit_p2(I2, 1e-9, 50);
        char what[64];
        std::snprintf(what, sizeof what, "ratio 50, I2 = %.2f: p2 / limit - 1", I2);
        c.near(what, p2 / target - 1, 0, 0.01);
        char buf[160];
        std::snprintf(buf, sizeof buf, "I2 = %.2f: p2 / limit - 1 = %.3g at ratio 100, %.3g at ratio 1000", I2,
                      limit_p2(I2, 1e-9, 100) / target - 1, limit_p2(I2, 1e-9, 1000) / target - 1);
        c.info(buf);
    }
    for (double I2 : {0.1, 0.21, 0.25, 0.4, 0.6}) {
        char what[64];
        std::snprintf(what, sizeof what, "ds1 = 3 sigma_n, I2 = %.2f: |p2 - I2|", I2);
        c.within(what, std::abs(limit_p2(I2, 3 * sigma, 1e3) - I2), 0, 1e-9);
    }
}

void ac6(Check& c) {
    auto piezo = load_config(kDir + "/fig6.cfg");
    double A = size_piezo_area_max(piezo).si();
    c.near("A_max disc diameter", 2 * std::sqrt(A / M_PI) * 1e3, 2.4, 0.1, " mm");
    c.near("choose_resistor", choose_resistor(piezo, 4.0).si(), 940, 30, " Ohm");
    auto near = approx_reduction_time_piezo(piezo);
    c.near("near-A_max approximate t_bar_c", near.t_bar.si() * 1e6, 0.86, 0.02, " us");
    if (near.branch != ApproxBranch::near_area_max) c.info("approximation used a different branch");
    auto plates = approx_movable_plates(load_config(kDir + "/fig8.cfg"));
    c.near("movable-plates approximate t_bar_c", plates.t_bar.si() * 1e6, 96, 2, " us");
    c.near("movable-plates approximate ds2", plates.ds2.si() * 1e10, 15, 1, " A");
}

void ac7(Check& c) {
    const double G = 6.67430e-11;
    const auto& al = aluminium();

    LatticeSpec one = lattice_for(al, {1, 1, 1});
    double m = one.nucleus_mass.si(), s = one.sigma_n.si();
    double limit = G * m * m / (std::sqrt(M_PI) * s);
    double far = dp_energy_numeric_oracle(one, {meters(1e8 * s), meters(0), meters(0)}).si();
    c.below("single pair vs self-energy limit", std::abs(far / limit - 1), 1e-6);

    auto L = lattice_for(al, {12, 12, 12});
    auto diag = [&](double x) {
        double d = x * L.sigma_n.si() / std::sqrt(3.0);
        return std::array<Length, 3>{meters(d), meters(d), meters(d)};
    };
    std::vector<double> lx, ly;
    for (int k = 0; k <= 10; ++k) {
        double x = 0.01 * std::pow(10.0, k / 10.0);
        lx.push_back(std::log(x));
        ly.push_back(std::log(dp_energy_numeric_oracle(L, diag(x), 4).si()));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= double(lx.size());
    my /= double(ly.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    c.near("small-shift exponent, 12^3 lattice", sxy / sxx, 2.0, 0.02);

    double tv = tbar_g(L.density(), 1.0, L.lattice_constant, L.sigma_n).si() * hbar * L.volume().si();
    double sat = 0;
    for (double x : {10.0, 12.5, 15.0, 17.5, 20.0}) sat = std::max(sat, dp_energy_numeric_oracle(L, diag(x), 4).si());
    c.near("saturation / (tbar_g V)", sat / tv, 1.0, 0.15);
}

void ac8(Check& c) {
    const int n = 1000;
    c.suite(column_sums(801, n));
    auto pipe = pipeline_invariants(802, n);
    c.suite(pipe.dI);
    c.suite(pipe.simplex);
    c.suite(pipe.branches);
    c.suite(born_two_state(803, n));
    c.suite(symmetrized_eigenvalues(804, n));
    c.suite(closed_form_vs_quadrature(805, n));
    auto delayed = delayed_curves(806, 12, 13);
    c.suite(delayed.monotone);
    c.suite(delayed.step);
    c.suite(signalling_grid(807, n));
}

void ac9(Check& c) {
    double share = detector_action_budget(ComponentBudget::defaults(), seconds(0.84e-6)).si() / hbar;
    c.below("default budget at 0.84 us / hbar", share, 1e-4);
    auto with = load_config(kDir + "/fig6.cfg");
    auto without = with;
    without.budget = ComponentBudget{};
    double a = run_experiment(with).result.t_bar_c.si();
    double b = run_experiment(without).result.t_bar_c.si();
    c.below("relative t_bar_c shift", std::abs(a / b - 1), 1e-3);
}

struct Criterion {
    const char* id;
    const char* title;
    double time_limit;   // seconds, 0 for none
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"AC1", "piezo setup reproduction", 1.0, ac1},
        {"AC2", "piezo setup without short-distance terms", 1.0, ac2},
        {"AC3", "movable-plates reproduction", 1.0, ac3},
        {"AC4", "ratio-4 benchmark", 0, ac4},
        {"AC5", "closed-form limits", 0, ac5},
        {"AC6", "sizing formulas", 0, ac6},
        {"AC7", "lattice oracle equivalence", 60.0, ac7},
        {"AC8", "property suites", 30.0, ac8},
        {"AC9", "detector budget negligibility", 0, ac9},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.lines.push_back(std::string("error ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.time_limit > 0) c.below("runtime", elapsed, cr.time_limit, " s");
        std::printf("%s %s  %s (%.2f s)\n", c.ok ? "PASS" : "FAIL", cr.id, cr.title, elapsed);
        for (const auto& l : c.lines) std::printf("    %s\n", l.c_str());
        if (!c.ok) ++failed;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
