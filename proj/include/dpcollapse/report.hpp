#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpcollapse/quantities.hpp"

namespace dpcollapse {

enum class OutputFormat { human, csv, json };

OutputFormat parse_output_format(std::string_view s);

/// One named output value. Numbers are SI; `display` is the unit used by
/// the human format.
struct Field {
    std::string name;
    std::variant<double, std::string, bool> value;
    Dimension dimension = Dimension::dimensionless;
    std::string display;

    static Field number(std::string name, double v) { return {std::move(name), v, Dimension::dimensionless, "1"}; }
    static Field text(std::string name, std::string v) {
        return {std::move(name), std::move(v), Dimension::dimensionless, ""};
    }
    static Field flag(std::string name, bool v) { return {std::move(name), v, Dimension::dimensionless, ""}; }

    template <Dimension D>
    static Field quantity(std::string name, Quantity<D> q, std::string display) {
        return {std::move(name), q.si(), D, std::move(display)};
    }
};

using Record = std::vector<Field>;

/// Rows share the column layout of the first row.
struct Table {
    std::vector<Record> rows;
    std::vector<std::string> warnings;
};

/// CSV: header `name[SI unit]`, numbers as %.16e, flags as 0/1. Warnings are
/// not part of CSV output.
void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);
/// One row: `name  value unit` lines. Several rows: aligned columns.
void write_human(std::ostream& out, const Table& t);
void write_table(std::ostream& out, const Table& t, OutputFormat f);

/// Header cell for a field, e.g. `t_bar_c[s]`.
std::string csv_header(const Field& f);

}  // namespace dpcollapse
