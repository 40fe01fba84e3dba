#include "dpcollapse/report.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

OutputFormat parse_output_format(std::string_view s) {
    if (s == "human") return OutputFormat::human;
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw DomainError("unknown output format '" + std::string(s) + "'");
}

std::string csv_header(const Field& f) {
    if (!std::holds_alternative<double>(f.value)) return f.name;
    return f.name + "[" + si_unit(f.dimension).symbol + "]";
}

namespace {

std::string csv_cell(const Field& f) {
    if (auto* d = std::get_if<double>(&f.value)) return fmt::format("{:.16e}", *d);
    if (auto* b = std::get_if<bool>(&f.value)) return *b ? "1" : "0";
    const auto& s = std::get<std::string>(f.value);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string human_value(const Field& f) {
    if (auto* b = std::get_if<bool>(&f.value)) return *b ? "yes" : "no";
    if (auto* s = std::get_if<std::string>(&f.value)) return *s;
    double v = std::get<double>(f.value);
    if (f.display.empty() || f.display == "1") return fmt::format("{:.6g}", v);
    double shown = convert(TaggedQuantity{v, si_unit(f.dimension)}, f.display).value;
    return fmt::format("{:.6g}", shown);
}

std::string human_unit(const Field& f) {
    if (!std::holds_alternative<double>(f.value) || f.display == "1") return {};
    return f.display;
}

void check_layout(const Table& t) {
    if (t.rows.empty()) return;
    const auto& first = t.rows.front();
    for (const auto& r : t.rows) {
        if (r.size() != first.size()) throw Error("table rows differ in width");
        for (std::size_t i = 0; i < r.size(); ++i)
            if (r[i].name != first[i].name) throw Error("table rows differ in layout");
    }
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
    check_layout(t);
    if (t.rows.empty()) return;
    std::string line;
    for (const auto& f : t.rows.front()) {
        if (!line.empty()) line += ',';
        line += csv_header(f);
    }
    out << line << '\n';
    for (const auto& r : t.rows) {
        line.clear();
        for (const auto& f : r) {
            if (!line.empty()) line += ',';
            line += csv_cell(f);
        }
        out << line << '\n';
    }
}

void write_json(std::ostream& out, const Table& t) {
    check_layout(t);
    nlohmann::ordered_json doc;
    nlohmann::ordered_json units = nlohmann::ordered_json::object();
    if (!t.rows.empty())
        for (const auto& f : t.rows.front())
            if (std::holds_alternative<double>(f.value)) units[f.name] = si_unit(f.dimension).symbol;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (const auto& f : r) std::visit([&](const auto& v) { o[f.name] = v; }, f.value);
        rows.push_back(std::move(o));
    }
    doc["units"] = std::move(units);
    doc["rows"] = std::move(rows);
    doc["warnings"] = t.warnings;
    out << doc.dump(2) << '\n';
}

void write_human(std::ostream& out, const Table& t) {
    check_layout(t);
    if (t.rows.size() == 1) {
        std::size_t w = 0;
        for (const auto& f : t.rows.front()) w = std::max(w, f.name.size());
        for (const auto& f : t.rows.front()) {
            std::string u = human_unit(f);
            fmt::print(out, "{:<{}}  {}{}\n", f.name, w, human_value(f), u.empty() ? "" : " " + u);
        }
    } else if (!t.rows.empty()) {
        const auto& first = t.rows.front();
        std::vector<std::string> head;
        for (const auto& f : first) {
            std::string u = human_unit(f);
            head.push_back(u.empty() ? f.name : f.name + " [" + u + "]");
        }
        std::vector<std::vector<std::string>> cells;
        for (const auto& r : t.rows) {
            std::vector<std::string> c;
            for (const auto& f : r) c.push_back(human_value(f));
            cells.push_back(std::move(c));
        }
        std::vector<std::size_t> w(head.size());
        for (std::size_t i = 0; i < head.size(); ++i) {
            w[i] = head[i].size();
            for (const auto& c : cells) w[i] = std::max(w[i], c[i].size());
        }
        auto row = [&](const std::vector<std::string>& c) {
            std::string line;
            for (std::size_t i = 0; i < c.size(); ++i)
                line += fmt::format("{}{:>{}}", i ? "  " : "", c[i], w[i]);
            out << line << '\n';
        };
        row(head);
        for (const auto& c : cells) row(c);
    }
    for (const auto& w : t.warnings) out << "warning: " << w << '\n';
}

void write_table(std::ostream& out, const Table& t, OutputFormat f) {
    switch (f) {
        case OutputFormat::human: write_human(out, t); break;
        case OutputFormat::csv: write_csv(out, t); break;
        case OutputFormat::json: write_json(out, t); break;
    }
}

}  // namespace dpcollapse
