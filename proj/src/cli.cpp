#include "dpcollapse/cli.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace dpcollapse::cli {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return config_error;
    if (dynamic_cast<const DimensionError*>(&e)) return dimension_error;
    if (dynamic_cast<const DomainError*>(&e)) return domain_error;
    if (dynamic_cast<const ConvergenceError*>(&e)) return convergence_error;
    if (dynamic_cast<const NoReductionError*>(&e)) return no_reduction;
    if (dynamic_cast<const MonotonicityError*>(&e)) return monotonicity_error;
    if (dynamic_cast<const std::ios_base::failure*>(&e)) return io_error;
    return failure;
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double u = double(i) / double(count - 1);
        v[std::size_t(i)] = log ? start * std::pow(stop / start, u) : start + (stop - start) * u;
    }
    v.front() = start;
    v.back() = stop;
    return v;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t b = 0;
    for (;;) {
        auto e = s.find(sep, b);
        out.push_back(s.substr(b, e == std::string::npos ? std::string::npos : e - b));
        if (e == std::string::npos) break;
        b = e + 1;
    }
    return out;
}

}  // namespace

SweepAxis parse_axis(const std::string& key, const std::string& spec) {
    auto info = key_info(key);
    if (!info) throw ConfigError(key, 0, "sweep axis refers to an unknown key");
    if (info->kind != KeyKind::quantity && info->kind != KeyKind::number)
        throw ConfigError(key, 0, "sweep axis must be a numeric key");
    auto parts = split(spec, ':');
    if (parts.size() != 3 && parts.size() != 4)
        throw DomainError("axis '" + spec + "' must read start:stop:count[:log]");
    SweepAxis a;
    a.key = key;
    a.numeric = info->kind == KeyKind::number;
    a.dimension = info->dimension;
    auto read = [&](const std::string& text) {
        auto q = parse_quantity(text, a.numeric);
        if (q.dimension() != a.dimension)
            throw DimensionError("axis value '" + text + "' is not a " +
                                 std::string(dimension_name(a.dimension)));
        return q.si();
    };
    a.start = read(parts[0]);
    a.stop = read(parts[1]);
    try {
        std::size_t used = 0;
        a.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("count");
    } catch (const std::logic_error&) {
        throw DomainError("axis count '" + parts[2] + "' is not an integer");
    }
    if (a.count < 2) throw DomainError("axis count must be at least 2");
    if (parts.size() == 4) {
        if (parts[3] == "log") a.log = true;
        else if (parts[3] != "lin") throw DomainError("axis scale must be 'log' or 'lin'");
    }
    if (a.log && !(a.start > 0 && a.stop > 0)) throw DomainError("log axis needs positive bounds");
    return a;
}

std::string override_text(const SweepAxis& axis, double v) {
    if (axis.numeric) return fmt::format("{:.17g}", v);
    return fmt::format("{:.17g} {}", v, si_unit(axis.dimension).symbol);
}

namespace {

std::string display_for(Dimension d) {
    switch (d) {
        case Dimension::time: return "us";
        case Dimension::length: return "mm";
        case Dimension::area: return "mm2";
        case Dimension::capacitance: return "pF";
        default: return si_unit(d).symbol;
    }
}

Record sweep_row(const std::vector<SweepAxis>& axes, const std::vector<double>& point,
                 const ExperimentReport& r) {
    Record row;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (axes[k].numeric)
            row.push_back(Field::number(axes[k].key, point[k]));
        else
            row.push_back({axes[k].key, point[k], axes[k].dimension, display_for(axes[k].dimension)});
    }
    row.push_back(Field::quantity("t_bar_c", r.result.t_bar_c, "us"));
    row.push_back(Field::number("p2", r.p2));
    row.push_back(Field::number("p2_over_I2", r.p2_over_I2));
    row.push_back(Field::quantity("ds1", r.ds1, "Angstrom"));
    row.push_back(Field::quantity("ds2", r.ds2, "Angstrom"));
    row.push_back(Field::flag("decorrelated", r.decorrelated));
    row.push_back(Field::number("detector_share", r.detector_share));
    return row;
}

void add_unique(std::vector<std::string>& dst, const std::vector<std::string>& src) {
    for (const auto& w : src)
        if (std::find(dst.begin(), dst.end(), w) == dst.end()) dst.push_back(w);
}

}  // namespace

Table run_sweep(const ConfigText& base, const std::vector<SweepAxis>& axes, int jobs) {
    if (axes.empty()) throw DomainError("sweep needs at least one --axis");
    for (std::size_t i = 0; i < axes.size(); ++i)
        for (std::size_t j = i + 1; j < axes.size(); ++j)
            if (axes[i].key == axes[j].key) throw DomainError("axis '" + axes[i].key + "' given twice");
    std::vector<std::vector<double>> grids;
    std::size_t total = 1;
    for (const auto& a : axes) {
        grids.push_back(a.values());
        total *= grids.back().size();
    }

    std::vector<Record> rows(total);
    std::vector<std::vector<std::string>> warnings(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};

    auto point_of = [&](std::size_t idx) {
        std::vector<double> p(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            p[k] = grids[k][idx % grids[k].size()];
            idx /= grids[k].size();
        }
        return p;
    };
    auto work = [&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < total;) {
            try {
                ConfigText t = base;
                auto p = point_of(idx);
                for (std::size_t k = 0; k < axes.size(); ++k) t.set(axes[k].key, override_text(axes[k], p[k]));
                auto rep = run_experiment(build_config(t));
                rows[idx] = sweep_row(axes, p, rep);
                warnings[idx] = rep.warnings;
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };
    std::size_t n = std::min<std::size_t>(std::size_t(std::max(jobs, 1)), total);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    Table out;
    for (std::size_t i = 0; i < total; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        add_unique(out.warnings, warnings[i]);
    }
    out.rows = std::move(rows);
    return out;
}

Table reduce_table(const ExperimentReport& rep) {
    const auto& r = rep.result;
    Record f;
    f.push_back(Field::text("experiment", std::string(experiment_kind_name(rep.config.kind))));
    f.push_back(Field::quantity("t_bar_c", r.t_bar_c, "us"));
    for (std::size_t i = 0; i < r.intensities.size(); ++i)
        f.push_back(Field::number(fmt::format("I{}", i), r.intensities[i]));
    f.push_back(Field::number("p2", rep.p2));
    f.push_back(Field::number("p2_over_I2", rep.p2_over_I2));
    f.push_back(Field::quantity("ds1", rep.ds1, "Angstrom"));
    f.push_back(Field::quantity("ds2", rep.ds2, "Angstrom"));
    f.push_back(Field::flag("decorrelated", rep.decorrelated));
    f.push_back(Field::number("decorrelation_margin", rep.decorrelation_margin));
    for (std::size_t i = 0; i < r.dI_c.size(); ++i) f.push_back(Field::number(fmt::format("dI{}", i), r.dI_c[i]));
    for (std::size_t i = 0; i < r.I_plus.size(); ++i)
        f.push_back(Field::number(fmt::format("I_plus{}", i), r.I_plus[i]));
    for (std::size_t i = 0; i < r.I_minus.size(); ++i)
        f.push_back(Field::number(fmt::format("I_minus{}", i), r.I_minus[i]));
    f.push_back(Field::number("alpha_plus", r.alpha_plus));
    f.push_back(Field::number("alpha_minus", r.alpha_minus));
    f.push_back(Field::number("p_plus", r.p_plus));
    f.push_back(Field::number("p_minus", r.p_minus));
    for (std::size_t i = 0; i < r.p_final.size(); ++i)
        f.push_back(Field::number(fmt::format("p_final{}", i), r.p_final[i]));
    const int n = r.actions.n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            f.push_back(Field::quantity(fmt::format("S{}{}", i, j), joule_seconds(r.actions(i, j)), "hbar"));
            f.push_back(Field::quantity(fmt::format("E{}{}", i, j), joules(r.energies(i, j)), "J"));
        }
    for (std::size_t i = 0; i < r.rates.size(); ++i)
        f.push_back(Field::quantity(fmt::format("rate{}", i), hertz(r.rates[i]), "MHz"));
    f.push_back(Field::quantity("e_max", r.e_max, "hbar"));
    f.push_back(Field::quantity("detector_action", r.detector_action, "hbar"));
    f.push_back(Field::number("detector_share", rep.detector_share));
    f.push_back(Field::flag("detector_negligible", rep.detector_negligible));
    f.push_back(Field::number("p_dark_count", rep.p_dark_count));
    if (rep.C_p) f.push_back(Field::quantity("C_p", *rep.C_p, "pF"));
    if (rep.C_p) f.push_back(Field::quantity("readout_dV", rep.readout_dV, "V"));
    if (rep.approx_time) {
        f.push_back(Field::quantity("approx_t_bar", rep.approx_time->t_bar, "us"));
        f.push_back(Field::text("approx_branch", std::string(approx_branch_name(rep.approx_time->branch))));
    }
    if (rep.approx_ds2) f.push_back(Field::quantity("approx_ds2", *rep.approx_ds2, "Angstrom"));
    if (rep.config.kind == ExperimentKind::movable_plates) {
        auto a = approx_movable_plates(rep.config);
        f.push_back(Field::quantity("approx_t_bar", a.t_bar, "us"));
        f.push_back(Field::quantity("approx_ds2", a.ds2, "Angstrom"));
    }
    if (rep.config.kind == ExperimentKind::signalling) {
        f.push_back(Field::number("signalling_ratio", signalling_ratio(rep.config.diode2.p_QE)));
        f.push_back(Field::quantity("arm_margin", signalling_arm_margin(r.t_bar_c), "m"));
    }
    Table t;
    t.rows.push_back(std::move(f));
    t.warnings = rep.warnings;
    return t;
}

namespace {

Table materials_table(const MaterialDatabase& db) {
    Table t;
    for (const auto& m : db.all()) {
        Record r;
        r.push_back(Field::text("name", m.name));
        r.push_back(Field::quantity("rho", m.rho, "g/cm3"));
        r.push_back(Field::quantity("g_bar", m.g_bar, "Angstrom"));
        r.push_back(Field::quantity("sigma_n", m.sigma_n, "Angstrom"));
        r.push_back(Field::quantity("tbar_g", m.tbar_g_over_hbar, "MHz/cm3"));
        r.push_back(Field::quantity("m_bar", m.m_bar, "u"));
        r.push_back(Field::quantity("d33", m.d33.value_or(LengthPerVoltage{}), "pm/V"));
        r.push_back(Field::number("eps_r", m.eps_r.value_or(0.0)));
        t.rows.push_back(std::move(r));
    }
    return t;
}

Table dimension_piezo_table(const ExperimentConfig& c, std::optional<double> ratio) {
    Record r;
    auto amax = size_piezo_area_max(c);
    auto approx = approx_reduction_time_piezo(c);
    r.push_back(Field::quantity("area", c.area, "mm2"));
    r.push_back(Field::quantity("A_max", amax, "mm2"));
    r.push_back(Field::quantity("A_max_diameter", meters(2.0 * std::sqrt(amax.si() / std::numbers::pi)), "mm"));
    r.push_back(Field::number("area_over_A_max", c.area / amax));
    r.push_back(Field::quantity("C_p", piezo_capacitance(c), "pF"));
    r.push_back(Field::number("attenuation", effective_attenuation(c)));
    r.push_back(Field::text("approx_branch", std::string(approx_branch_name(approx.branch))));
    r.push_back(Field::quantity("approx_t_bar", approx.t_bar, "us"));
    r.push_back(Field::quantity("approx_ds2", approx_displacement_piezo(c), "Angstrom"));
    if (ratio) {
        r.push_back(Field::number("target_ratio", *ratio));
        r.push_back(Field::quantity("R_series", choose_resistor(c, *ratio), "Ohm"));
    }
    Table t;
    t.rows.push_back(std::move(r));
    t.warnings = approx.warnings;
    return t;
}

Table dimension_plates_table(const ExperimentConfig& c) {
    auto a = approx_movable_plates(c);
    Record r;
    r.push_back(Field::quantity("area", c.area, "mm2"));
    r.push_back(Field::quantity("gap", c.gap, "mm"));
    r.push_back(Field::quantity("plate_thickness", c.plate_thickness, "mm"));
    r.push_back(Field::quantity("approx_t_bar", a.t_bar, "us"));
    r.push_back(Field::quantity("approx_ds2", a.ds2, "Angstrom"));
    Table t;
    t.rows.push_back(std::move(r));
    return t;
}

Table delayed_table(const DelayedCurve& curve) {
    Table t;
    for (const auto& p : curve.points) {
        Record r;
        r.push_back(Field::quantity("delay", p.delay, "us"));
        r.push_back(Field::number("p2", p.p2));
        r.push_back(Field::flag("born", p.born));
        r.push_back(Field::quantity("t_bar_01", curve.t_bar_01, "us"));
        r.push_back(Field::number("I2", curve.I2));
        t.rows.push_back(std::move(r));
    }
    t.warnings = curve.warnings;
    return t;
}

Table signalling_table(double pqe2, double pqe1, Time tbar) {
    auto s = signalling_chain(pqe2, pqe1);
    Record r;
    r.push_back(Field::number("p_QE2", pqe2));
    r.push_back(Field::number("p_H2", s.p_H2));
    r.push_back(Field::number("p_H0", s.p_H0));
    r.push_back(Field::number("p_V1", s.p_V1));
    r.push_back(Field::number("p_V0", s.p_V0));
    r.push_back(Field::number("p_H2_final", s.p_H2n));
    r.push_back(Field::number("p_H0_final", s.p_H0n));
    r.push_back(Field::number("p_V1_final", s.p_V1n));
    r.push_back(Field::number("p_V0_final", s.p_V0n));
    r.push_back(Field::number("ratio", signalling_ratio(pqe2)));
    r.push_back(Field::quantity("t_bar_c", tbar, "us"));
    r.push_back(Field::quantity("arm_margin", signalling_arm_margin(tbar), "m"));
    Table t;
    t.rows.push_back(std::move(r));
    return t;
}

Table oracle_table(const std::string& material, int n, const std::vector<double>& ds_sigma,
                   int threads, long cap) {
    const auto& m = MaterialDatabase::standard().get(material);
    auto lat = lattice_for(m, {n, n, n});
    lat.max_nuclei = cap;
    double sigma = lat.sigma_n.si();
    auto sat = tbar_g(lat.density(), 1.0, lat.lattice_constant, lat.sigma_n).si() * kConstants.hbar *
               lat.volume().si();
    Table t;
    for (double k : ds_sigma) {
        if (!(k >= 0)) throw DomainError("displacements must be non-negative");
        double c = k * sigma / std::sqrt(3.0);
        auto e = dp_energy_numeric_oracle(lat, {meters(c), meters(c), meters(c)}, threads);
        Record r;
        r.push_back(Field::number("ds_over_sigma", k));
        r.push_back(Field::quantity("ds", meters(k * sigma), "Angstrom"));
        r.push_back(Field::quantity("E_numeric", e, "J"));
        r.push_back(Field::quantity("E_saturation", joules(sat), "J"));
        r.push_back(Field::number("E_over_saturation", e.si() / sat));
        t.rows.push_back(std::move(r));
    }
    return t;
}

std::vector<Time> parse_delays(const std::string& spec) {
    std::vector<Time> out;
    auto parts = split(spec, ':');
    if (parts.size() == 3 && spec.find(',') == std::string::npos) {
        Time a = require<Dimension::time>(parse_quantity(parts[0]));
        Time b = require<Dimension::time>(parse_quantity(parts[1]));
        int n = std::stoi(parts[2]);
        if (n < 2) throw DomainError("delay count must be at least 2");
        for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * (double(i) / (n - 1)));
        return out;
    }
    for (const auto& p : split(spec, ',')) out.push_back(require<Dimension::time>(parse_quantity(p)));
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gravitational collapse engine: reduction times and probabilities of superposed solids"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, output_path, format_name, horizon_text;
    bool no_short = false;
    app.add_option("--config", config_path, "experiment configuration file");
    app.add_option("--output", output_path, "write results to this file instead of stdout");
    app.add_option("--format", format_name, "csv, json or human")
        ->check(CLI::IsMember({"csv", "json", "human"}));
    app.add_flag("--no-short-distance", no_short, "drop the short-distance DP energy");
    app.add_option("--horizon", horizon_text, "give up when no reduction happens before this time");

    auto* materials = app.add_subcommand("materials", "material database");
    materials->fallthrough();
    materials->require_subcommand(1);
    auto* materials_list = materials->add_subcommand("list", "list known materials");
    materials_list->fallthrough();

    auto* reduce = app.add_subcommand("reduce", "solve one experiment");
    reduce->fallthrough();

    std::string dim_kind;
    double ratio = 0;
    auto* dimension = app.add_subcommand("dimension", "closed-form sizing");
    dimension->fallthrough();
    dimension->add_option("kind", dim_kind, "piezo or plates")->required()->check(CLI::IsMember({"piezo", "plates"}));
    auto* ratio_opt = dimension->add_option("--ratio", ratio, "pick the series resistance for this V2/V1 ratio");

    std::vector<std::string> axis_args;
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    sweep->fallthrough();
    sweep->add_option("--axis", axis_args, "<key> <start>:<stop>:<count>[:log]")
        ->expected(2)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->required();
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string delays_spec;
    auto* delayed = app.add_subcommand("delayed", "reduction probability over the switch delay");
    delayed->fallthrough();
    delayed->add_option("--delays", delays_spec, "t0:t1:count or a comma list of times")->required();

    double pqe2 = 0.7, pqe1 = 0.35;
    std::string tbar_text;
    auto* signalling = app.add_subcommand("signalling", "remote intensity ratio and arm margin");
    signalling->fallthrough();
    auto* pqe2_opt = signalling->add_option("--pqe2", pqe2, "quantum efficiency of photodiode 2");
    signalling->add_option("--pqe1", pqe1, "quantum efficiency of photodiode 1");
    signalling->add_option("--tbar", tbar_text, "reduction time (default 0.84 us, or solved from --config)");

    auto* oracle = app.add_subcommand("oracle", "independent numerical checks");
    oracle->fallthrough();
    oracle->require_subcommand(1);
    std::string oracle_material = "aluminium";
    int oracle_n = 12, oracle_threads = 1;
    long oracle_cap = 20L * 20 * 20;
    std::vector<double> oracle_ds{0.01, 0.1, 1.0, 10.0, 15.0, 20.0};
    auto* dp_numeric = oracle->add_subcommand("dp-numeric", "lattice pair sum of the DP energy");
    dp_numeric->fallthrough();
    dp_numeric->add_option("--material", oracle_material);
    dp_numeric->add_option("--lattice", oracle_n, "nuclei per edge")->check(CLI::PositiveNumber);
    dp_numeric->add_option("--ds-sigma", oracle_ds, "displacements in units of sigma_n")->delimiter(',');
    dp_numeric->add_option("--threads", oracle_threads)->check(CLI::PositiveNumber);
    dp_numeric->add_option("--max-nuclei", oracle_cap)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        std::optional<ConfigText> text;
        auto need_config = [&]() -> ConfigText& {
            if (!text) {
                if (config_path.empty()) throw ConfigError("", 0, "this command needs --config");
                text = ConfigText::load(config_path);
                if (no_short) text->set("model.short_distance", "off");
                if (!horizon_text.empty()) text->set("model.horizon", horizon_text);
            }
            return *text;
        };

        Table table;
        OutputFormat fmt_default = OutputFormat::human;
        if (materials_list->parsed()) {
            table = materials_table(MaterialDatabase::standard());
        } else if (reduce->parsed()) {
            table = reduce_table(run_experiment(build_config(need_config())));
        } else if (dimension->parsed()) {
            auto c = build_config(need_config());
            if (dim_kind == "piezo") {
                table = dimension_piezo_table(c, ratio_opt->count() ? std::optional<double>(ratio) : std::nullopt);
            } else {
                table = dimension_plates_table(c);
            }
        } else if (sweep->parsed()) {
            std::vector<SweepAxis> axes;
            for (std::size_t i = 0; i + 1 < axis_args.size(); i += 2)
                axes.push_back(parse_axis(axis_args[i], axis_args[i + 1]));
            table = run_sweep(need_config(), axes, jobs);
            fmt_default = OutputFormat::csv;
        } else if (delayed->parsed()) {
            table = delayed_table(delayed_two_state_curve(build_config(need_config()), parse_delays(delays_spec)));
            fmt_default = OutputFormat::csv;
        } else if (signalling->parsed()) {
            Time tbar = seconds(0.84e-6);
            if (!config_path.empty()) {
                auto c = build_config(need_config());
                if (!pqe2_opt->count()) pqe2 = c.diode2.p_QE;
                pqe1 = c.diode1.p_QE;
                tbar = c.signalling_tbar ? *c.signalling_tbar : run_experiment(c).result.t_bar_c;
            }
            if (!tbar_text.empty()) tbar = require<Dimension::time>(parse_quantity(tbar_text));
            table = signalling_table(pqe2, pqe1, tbar);
        } else if (dp_numeric->parsed()) {
            table = oracle_table(oracle_material, oracle_n, oracle_ds, oracle_threads, oracle_cap);
        }

        OutputFormat f = format_name.empty() ? fmt_default : parse_output_format(format_name);
        if (f == OutputFormat::csv)
            for (const auto& w : table.warnings) err << "warning: " << w << '\n';
        if (output_path.empty()) {
            write_table(out, table, f);
        } else {
            std::ofstream file(output_path);
            if (!file) {
                err << "error: cannot write '" << output_path << "'\n";
                return io_error;
            }
            write_table(file, table, f);
        }
        return ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace dpcollapse::cli
