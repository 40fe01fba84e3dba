#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "dpcollapse/config.hpp"
#include "dpcollapse/report.hpp"

namespace dpcollapse::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    usage = 2,
    config_error = 3,
    dimension_error = 4,
    domain_error = 5,
    convergence_error = 6,
    no_reduction = 7,
    monotonicity_error = 8,
    io_error = 9,
};

int exit_code_for(const std::exception& e);

struct SweepAxis {
    std::string key;
    double start = 0, stop = 0;   // SI
    int count = 0;
    bool log = false;
    Dimension dimension = Dimension::dimensionless;
    bool numeric = false;         // bare-number key such as beam_splitter.T2

    std::vector<double> values() const;
};

/// `1mm2:20mm2:40:log`; start and stop carry units matching the key.
SweepAxis parse_axis(const std::string& key, const std::string& spec);

/// Value text for a config override, e.g. `1.0000000000000000e-06 m2`.
std::string override_text(const SweepAxis& axis, double si_value);

/// Grid points in row-major order (last axis fastest), run on up to `jobs`
/// threads; the row order does not depend on `jobs`.
Table run_sweep(const ConfigText& base, const std::vector<SweepAxis>& axes, int jobs);

Table reduce_table(const ExperimentReport& r);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dpcollapse::cli
