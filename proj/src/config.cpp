#include "dpcollapse/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace dpcollapse {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

const std::map<std::string, KeyInfo, std::less<>>& schema() {
    using D = Dimension;
    auto q = [](D d) { return KeyInfo{KeyKind::quantity, d}; };
    static const std::map<std::string, KeyInfo, std::less<>> s = [&] {
        std::map<std::string, KeyInfo, std::less<>> m{
            {"experiment.kind", {KeyKind::text}},
            {"beam_splitter.T2", {KeyKind::number}},
            {"beam_splitter.R2", {KeyKind::number}},
            {"solid.area", q(D::area)},
            {"solid.diameter", q(D::length)},
            {"solid.piezo.material", {KeyKind::text}},
            {"solid.piezo.d", q(D::length)},
            {"solid.plate.material", {KeyKind::text}},
            {"solid.plate.d_m", q(D::length)},
            {"solid.gap", q(D::length)},
            {"circuit.R", q(D::resistance)},
            {"circuit.C_bias", q(D::capacitance)},
            {"circuit.t_connected", q(D::time)},
            {"circuit.t_q", q(D::time)},
            {"delayed.delay", q(D::time)},
            {"delayed.V2", q(D::voltage)},
            {"delayed.R_switch", q(D::resistance)},
            {"signalling.t_bar", q(D::time)},
            {"model.short_distance", {KeyKind::flag}},
            {"model.horizon", q(D::time)},
        };
        for (std::string d : {"diode1.", "diode2."}) {
            m[d + "V_B"] = q(D::voltage);
            m[d + "V_E"] = q(D::voltage);
            m[d + "p_QE"] = {KeyKind::number};
            m[d + "f_DC"] = q(D::frequency);
            m[d + "R_d"] = q(D::resistance);
            m[d + "t_res"] = q(D::time);
            m[d + "I_q"] = q(D::current);
        }
        return m;
    }();
    return s;
}

bool is_budget_key(std::string_view key) {
    return key.starts_with("budget.") && key.size() > 7 &&
           key.substr(7).find('.') == std::string_view::npos;
}

}  // namespace

std::optional<KeyInfo> key_info(std::string_view key) {
    if (is_budget_key(key)) return KeyInfo{KeyKind::quantity, Dimension::time};
    auto it = schema().find(key);
    if (it == schema().end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> out;
    for (const auto& [k, v] : schema()) out.push_back(k);
    out.push_back("budget.<component>");
    return out;
}

ConfigText ConfigText::parse(std::string_view text, std::string origin) {
    ConfigText c;
    c.origin_ = std::move(origin);
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("", line, "expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (!key_info(key)) throw ConfigError(key, line, "unknown key");
        if (value.empty()) throw ConfigError(key, line, "missing value");
        if (c.find(key)) throw ConfigError(key, line, "duplicate key");
        c.entries_.push_back({key, value, line});
    }
    if (c.find("solid.area") && c.find("solid.diameter"))
        throw ConfigError("solid.diameter", c.find("solid.diameter")->line,
                          "give either solid.area or solid.diameter, not both");
    return c;
}

ConfigText ConfigText::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("", 0, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

const ConfigEntry* ConfigText::find(std::string_view key) const {
    for (const auto& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

void ConfigText::set(const std::string& key, const std::string& value) {
    if (!key_info(key)) throw ConfigError(key, 0, "unknown key");
    auto drop = [&](std::string_view k) {
        entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                      [&](const ConfigEntry& e) { return e.key == k; }),
                       entries_.end());
    };
    if (key == "solid.area") drop("solid.diameter");
    if (key == "solid.diameter") drop("solid.area");
    for (auto& e : entries_) {
        if (e.key == key) {
            e.value = value;
            e.line = 0;
            return;
        }
    }
    entries_.push_back({key, value, 0});
}

namespace {

class Reader {
public:
    explicit Reader(const ConfigText& t) : t_(t) {}

    template <Dimension D>
    std::optional<Quantity<D>> quantity(std::string_view key) const {
        const auto* e = t_.find(key);
        if (!e) return std::nullopt;
        try {
            return require<D>(parse_quantity(e->value, false));
        } catch (const DimensionError& ex) {
            throw ConfigError(e->key, e->line, ex.what());
        }
    }

    std::optional<double> number(std::string_view key) const {
        const auto* e = t_.find(key);
        if (!e) return std::nullopt;
        try {
            return require<Dimension::dimensionless>(parse_quantity(e->value, true)).si();
        } catch (const DimensionError& ex) {
            throw ConfigError(e->key, e->line, ex.what());
        }
    }

    std::optional<std::string> text(std::string_view key) const {
        const auto* e = t_.find(key);
        if (!e) return std::nullopt;
        return e->value;
    }

    std::optional<bool> flag(std::string_view key) const {
        const auto* e = t_.find(key);
        if (!e) return std::nullopt;
        if (e->value == "on" || e->value == "true" || e->value == "yes") return true;
        if (e->value == "off" || e->value == "false" || e->value == "no") return false;
        throw ConfigError(e->key, e->line, "expected on/off");
    }

    [[noreturn]] void fail(std::string_view key, const std::string& what) const {
        const auto* e = t_.find(key);
        throw ConfigError(std::string(key), e ? e->line : 0, what);
    }

private:
    const ConfigText& t_;
};

template <class T>
void assign(T& dst, const std::optional<T>& v) {
    if (v) dst = *v;
}

void read_diode(const Reader& r, const std::string& p, PhotodiodeParams& d) {
    assign(d.V_B, r.quantity<Dimension::voltage>(p + "V_B"));
    assign(d.V_E, r.quantity<Dimension::voltage>(p + "V_E"));
    assign(d.p_QE, r.number(p + "p_QE"));
    assign(d.f_DC, r.quantity<Dimension::frequency>(p + "f_DC"));
    assign(d.R_d, r.quantity<Dimension::resistance>(p + "R_d"));
    assign(d.t_res, r.quantity<Dimension::time>(p + "t_res"));
    assign(d.I_q, r.quantity<Dimension::current>(p + "I_q"));
}

}  // namespace

ExperimentConfig build_config(const ConfigText& t, const MaterialDatabase& db) {
    Reader r(t);
    ExperimentKind kind = ExperimentKind::piezo_capacitor;
    if (auto k = r.text("experiment.kind")) {
        try {
            kind = parse_experiment_kind(*k);
        } catch (const DomainError& e) {
            r.fail("experiment.kind", e.what());
        }
    }
    ExperimentConfig c = kind == ExperimentKind::movable_plates ? default_movable_plates_config()
                                                                : default_piezo_config();
    c.kind = kind;

    assign(c.beam_splitter.T2, r.number("beam_splitter.T2"));
    assign(c.beam_splitter.R2, r.number("beam_splitter.R2"));
    if (c.beam_splitter.T2 + c.beam_splitter.R2 > 1.0 + 1e-12)
        r.fail(t.find("beam_splitter.R2") ? "beam_splitter.R2" : "beam_splitter.T2",
               "T2 + R2 exceeds 1");
    read_diode(r, "diode1.", c.diode1);
    read_diode(r, "diode2.", c.diode2);

    if (auto a = r.quantity<Dimension::area>("solid.area")) c.area = *a;
    if (auto d = r.quantity<Dimension::length>("solid.diameter"))
        c.area = square_meters(std::numbers::pi * d->si() * d->si() / 4.0);
    if (t.find("solid.piezo.d") && t.find("solid.gap"))
        r.fail("solid.gap", "give either solid.piezo.d or solid.gap, not both");
    assign(c.gap, r.quantity<Dimension::length>("solid.piezo.d"));
    assign(c.gap, r.quantity<Dimension::length>("solid.gap"));
    assign(c.plate_thickness, r.quantity<Dimension::length>("solid.plate.d_m"));
    auto material = [&](const char* key, Material& dst) {
        if (auto name = r.text(key)) {
            const Material* m = db.find(*name);
            if (!m) r.fail(key, "unknown material '" + *name + "'");
            dst = *m;
        }
    };
    material("solid.piezo.material", c.piezo_material);
    material("solid.plate.material", c.plate_material);

    assign(c.R_series, r.quantity<Dimension::resistance>("circuit.R"));
    if (auto v = r.quantity<Dimension::capacitance>("circuit.C_bias")) c.C_bias = *v;
    assign(c.t_connected, r.quantity<Dimension::time>("circuit.t_connected"));
    if (auto v = r.quantity<Dimension::time>("circuit.t_q")) c.t_q = *v;
    assign(c.delay, r.quantity<Dimension::time>("delayed.delay"));
    assign(c.V2_charge, r.quantity<Dimension::voltage>("delayed.V2"));
    if (auto v = r.quantity<Dimension::resistance>("delayed.R_switch")) c.R_switch = *v;
    if (auto v = r.quantity<Dimension::time>("signalling.t_bar")) c.signalling_tbar = *v;
    assign(c.include_short_distance, r.flag("model.short_distance"));
    assign(c.horizon, r.quantity<Dimension::time>("model.horizon"));

    ComponentBudget budget;
    for (const auto& e : t.entries()) {
        if (!is_budget_key(e.key)) continue;
        budget.components.emplace_back(e.key.substr(7), *r.quantity<Dimension::time>(e.key));
    }
    if (!budget.components.empty()) c.budget = budget;

    try {
        c.validate();
    } catch (const Error& e) {
        throw ConfigError("", 0, t.origin() + ": " + e.what());
    }
    return c;
}

ExperimentConfig parse_config(std::string_view text, std::string origin) {
    return build_config(ConfigText::parse(text, std::move(origin)));
}

ExperimentConfig load_config(const std::string& path) {
    return build_config(ConfigText::load(path));
}

}  // namespace dpcollapse
