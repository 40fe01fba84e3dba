#include "dpcollapse/materials.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace dpcollapse {

FrequencyPerVolume tbar_g(MassDensity rho, double q_hat, Length g_bar, Length sigma_n) {
    if (!(rho.si() > 0) || !(q_hat > 0) || !(g_bar.si() > 0) || !(sigma_n.si() > 0))
        throw DomainError("tbar_g: all inputs must be positive");
    const auto& k = kConstants;
    double g3 = std::pow(g_bar.si(), 3);
    double v = k.G * q_hat * rho.si() * rho.si() * g3 /
               (std::sqrt(std::numbers::pi) * sigma_n.si()) / k.hbar;
    return FrequencyPerVolume::from_si(v);
}

Length sigma_n_from_debye(Temperature T, Mass m_bar, Temperature theta_debye) {
    if (!(T.si() > 0) || !(m_bar.si() > 0) || !(theta_debye.si() > 0))
        throw DomainError("sigma_n_from_debye: all inputs must be positive");
    const auto& k = kConstants;
    double v_th = std::sqrt(3.0 * k.kB * T.si() / m_bar.si());
    return meters(v_th * k.hbar / (k.kB * theta_debye.si()));
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Pending {
    std::string name;
    int line = 0;
    std::map<std::string, std::pair<TaggedQuantity, int>> values;
};

template <Dimension D>
Quantity<D> take(const Pending& p, const std::string& key) {
    auto it = p.values.find(key);
    if (it == p.values.end())
        throw ConfigError(p.name + "." + key, p.line, "required key missing");
    try {
        return require<D>(it->second.first);
    } catch (const DimensionError& e) {
        throw ConfigError(p.name + "." + key, it->second.second, e.what());
    }
}

template <Dimension D>
std::optional<Quantity<D>> take_opt(const Pending& p, const std::string& key) {
    if (!p.values.count(key)) return std::nullopt;
    return take<D>(p, key);
}

Material finish(const Pending& p) {
    Material m;
    m.name = p.name;
    m.rho = take<Dimension::mass_density>(p, "rho");
    m.m_bar = take<Dimension::mass>(p, "m_bar");
    m.theta_debye = take<Dimension::temperature>(p, "theta_debye");
    m.sound_speed_longitudinal = take<Dimension::velocity>(p, "sound_speed_longitudinal");
    if (auto q = take_opt<Dimension::dimensionless>(p, "q_hat")) m.q_hat = q->si();
    if (!(m.rho.si() > 0) || !(m.m_bar.si() > 0) || !(m.theta_debye.si() > 0) || !(m.q_hat > 0))
        throw ConfigError(p.name, p.line, "rho, m_bar, theta_debye and q_hat must be positive");

    m.g_bar = take_opt<Dimension::length>(p, "g_bar")
                  .value_or(meters(std::cbrt(m.m_bar.si() / m.rho.si())));
    m.sigma_n = take_opt<Dimension::length>(p, "sigma_n")
                    .value_or(sigma_n_from_debye(kelvin(300.0), m.m_bar, m.theta_debye));
    if (!(m.g_bar.si() > 0) || !(m.sigma_n.si() > 0))
        throw ConfigError(p.name, p.line, "g_bar and sigma_n must be positive");
    if (!(m.sigma_n < m.g_bar))
        throw ConfigError(p.name + ".sigma_n", p.line, "sigma_n must be smaller than g_bar");
    m.tbar_g_over_hbar = take_opt<Dimension::frequency_per_volume>(p, "tbar_g_over_hbar")
                             .value_or(tbar_g(m.rho, m.q_hat, m.g_bar, m.sigma_n));

    m.d33 = take_opt<Dimension::length_per_voltage>(p, "d33");
    if (auto e = take_opt<Dimension::dimensionless>(p, "eps_r")) m.eps_r = e->si();
    m.elastic_modulus = take_opt<Dimension::pressure>(p, "elastic_modulus");
    m.resistivity = take_opt<Dimension::resistivity>(p, "resistivity");
    return m;
}

const char* const kKeys[] = {"rho",     "g_bar",      "sigma_n",     "tbar_g_over_hbar",
                             "q_hat",   "m_bar",      "theta_debye", "sound_speed_longitudinal",
                             "d33",     "eps_r",      "elastic_modulus", "resistivity"};

bool known_key(const std::string& k) {
    for (auto* s : kKeys)
        if (k == s) return true;
    return false;
}

bool dimensionless_key(const std::string& k) { return k == "q_hat" || k == "eps_r"; }

}  // namespace

MaterialDatabase MaterialDatabase::parse(std::string_view text, std::string_view origin) {
    MaterialDatabase db;
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    std::optional<Pending> cur;
    auto flush = [&] {
        if (cur) db.merge_one(finish(*cur));
        cur.reset();
    };
    std::string where = std::string(origin);
    try {
        while (std::getline(in, raw)) {
            ++lineno;
            auto hash = raw.find('#');
            std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3)
                    throw ConfigError("", lineno, "malformed section header");
                flush();
                cur = Pending{trim(line.substr(1, line.size() - 2)), lineno, {}};
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("", lineno, "expected 'key = value unit'");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (!cur) throw ConfigError(key, lineno, "key outside of a [material] section");
            if (!known_key(key)) throw ConfigError(cur->name + "." + key, lineno, "unknown key");
            if (cur->values.count(key))
                throw ConfigError(cur->name + "." + key, lineno, "duplicate key");
            try {
                cur->values.emplace(key, std::make_pair(parse_quantity(val, dimensionless_key(key)),
                                                        lineno));
            } catch (const DimensionError& e) {
                throw ConfigError(cur->name + "." + key, lineno, e.what());
            }
        }
        flush();
    } catch (const ConfigError& e) {
        throw ConfigError(e.key(), e.line(), where + ": " + e.what());
    }
    return db;
}

MaterialDatabase MaterialDatabase::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("", 0, "cannot open material file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

const MaterialDatabase& MaterialDatabase::standard() {
    static const MaterialDatabase db = [] {
        auto base = parse(builtin_materials_text(), "builtin");
        if (const char* p = std::getenv("DPCOLLAPSE_MATERIALS"); p && *p) base.merge(load_file(p));
        return base;
    }();
    return db;
}

void MaterialDatabase::merge_one(Material m) {
    for (auto& x : items_) {
        if (x.name == m.name) {
            x = std::move(m);
            return;
        }
    }
    items_.push_back(std::move(m));
}

void MaterialDatabase::merge(const MaterialDatabase& other) {
    for (const auto& m : other.items_) merge_one(m);
}

const Material* MaterialDatabase::find(std::string_view name) const {
    for (const auto& m : items_)
        if (m.name == name) return &m;
    return nullptr;
}

const Material& MaterialDatabase::get(std::string_view name) const {
    if (auto* m = find(name)) return *m;
    throw ConfigError(std::string(name), 0, "unknown material");
}

std::vector<Material> builtin_materials() {
    return MaterialDatabase::parse(builtin_materials_text(), "builtin").all();
}

}  // namespace dpcollapse
