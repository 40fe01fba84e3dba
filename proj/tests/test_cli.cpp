#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpcollapse/cli.hpp"
#include "dpcollapse/config.hpp"

using namespace dpcollapse;
using Catch::Approx;

namespace {

const std::string kDir = DPCOLLAPSE_CONFIG_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "dpcollapse");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

std::vector<std::string> lines(const std::string& s) { return split(s, '\n'); }

std::string temp_config(const std::string& name, const std::string& text) {
    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("reduce on the shipped piezo configuration", "[cli]") {
    auto r = run({"reduce", "--config", kDir + "/fig6.cfg", "--format", "json"});
    REQUIRE(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    const auto& row = doc["rows"][0];
    CHECK(row["t_bar_c"].get<double>() == Approx(0.84e-6).margin(0.02e-6));
    CHECK(row["p2_over_I2"].get<double>() == Approx(1.56).margin(0.03));
    CHECK(doc["units"]["t_bar_c"] == "s");
    CHECK(doc["units"]["ds2"] == "m");
}

TEST_CASE("human output shows display units", "[cli]") {
    auto r = run({"reduce", "--config", kDir + "/fig6.cfg"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("t_bar_c") != std::string::npos);
    CHECK(r.out.find(" us\n") != std::string::npos);
    CHECK(r.out.find("Angstrom") != std::string::npos);
}

TEST_CASE("no-short-distance flag", "[cli]") {
    auto r = run({"--no-short-distance", "reduce", "--config", kDir + "/fig6.cfg", "--format", "json"});
    REQUIRE(r.code == 0);
    auto row = nlohmann::json::parse(r.out)["rows"][0];
    CHECK(row["t_bar_c"].get<double>() == Approx(0.87e-6).margin(0.02e-6));
    CHECK(row["p2_over_I2"].get<double>() == Approx(1.49).margin(0.03));
}

TEST_CASE("sweep emits one CSV row per grid point", "[cli]") {
    auto r = run({"sweep", "--config", kDir + "/fig6.cfg", "--axis", "solid.area", "1mm2:20mm2:40:log"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 41);
    CHECK(ls[0] ==
          "solid.area[m2],t_bar_c[s],p2[1],p2_over_I2[1],ds1[m],ds2[m],decorrelated,detector_share[1]");

    // t_bar_c falls as 1/A below A_max and rises again at large A
    auto c = load_config(kDir + "/fig6.cfg");
    double Amax = size_piezo_area_max(c).si();
    std::vector<double> A, t;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i], ',');
        REQUIRE(f.size() == 8);
        A.push_back(std::stod(f[0]));
        t.push_back(std::stod(f[1]));
    }
    CHECK(A.front() == Approx(1e-6).epsilon(1e-15));
    CHECK(A.back() == Approx(20e-6).epsilon(1e-15));
    for (std::size_t i = 1; i < A.size(); ++i) {
        CHECK(A[i] > A[i - 1]);
        if (A[i] <= Amax) CHECK(t[i] < t[i - 1]);
        if (A[i - 1] >= 2 * Amax) CHECK(t[i] > t[i - 1]);
    }
}

TEST_CASE("sweep output does not depend on the job count", "[cli]") {
    std::vector<std::string> base{"sweep", "--config", kDir + "/fig6.cfg", "--axis", "solid.area",
                                  "2mm2:8mm2:6", "--axis", "beam_splitter.T2", "0.5:0.7:3"};
    auto one = base, four = base;
    one.insert(one.end(), {"--jobs", "1"});
    four.insert(four.end(), {"--jobs", "4"});
    auto a = run(one), b = run(four);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(lines(a.out).size() == 19);
}

TEST_CASE("sweep CSV rows reproduce from their parameters", "[cli]") {
    auto r = run({"sweep", "--config", kDir + "/fig6.cfg", "--axis", "solid.area", "1mm2:20mm2:5:log"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = split(ls[i], ',');
        auto text = ConfigText::load(kDir + "/fig6.cfg");
        text.set("solid.area", f[0] + " m2");
        auto rep = run_experiment(build_config(text));
        CHECK(rep.result.t_bar_c.si() == Approx(std::stod(f[1])).epsilon(1e-9));
        CHECK(rep.p2 == Approx(std::stod(f[2])).epsilon(1e-9));
        CHECK(rep.ds1.si() == Approx(std::stod(f[4])).epsilon(1e-9));
        CHECK(rep.ds2.si() == Approx(std::stod(f[5])).epsilon(1e-9));
        CHECK((rep.decorrelated ? "1" : "0") == f[6]);
    }
}

TEST_CASE("identical commands give identical bytes", "[cli]") {
    for (const char* f : {"human", "csv", "json"}) {
        auto a = run({"reduce", "--config", kDir + "/fig8.cfg", "--format", f});
        auto b = run({"reduce", "--config", kDir + "/fig8.cfg", "--format", f});
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("sweep axis parsing", "[cli]") {
    auto ax = cli::parse_axis("solid.area", "1mm2:20mm2:40:log");
    CHECK(ax.count == 40);
    CHECK(ax.log);
    CHECK(ax.values().front() == Approx(1e-6));
    CHECK(ax.values().back() == Approx(2e-5));
    auto lin = cli::parse_axis("beam_splitter.T2", "0.5:0.7:3");
    CHECK(lin.numeric);
    CHECK(lin.values()[1] == Approx(0.6));
    CHECK_THROWS(cli::parse_axis("solid.area", "1mm:2mm:4"));
    CHECK_THROWS(cli::parse_axis("solid.area", "1mm2:2mm2:1"));
    CHECK_THROWS(cli::parse_axis("solid.volume", "1m3:2m3:3"));
    CHECK_THROWS(cli::parse_axis("solid.piezo.material", "a:b:2"));
}

TEST_CASE("signalling command", "[cli]") {
    auto r = run({"signalling", "--pqe2", "0.7", "--format", "json"});
    REQUIRE(r.code == 0);
    auto row = nlohmann::json::parse(r.out)["rows"][0];
    CHECK(row["ratio"].get<double>() == Approx(1.7).epsilon(1e-12));
    CHECK(row["arm_margin"].get<double>() == Approx(252).margin(1));
}

TEST_CASE("dimension commands", "[cli]") {
    auto p = run({"dimension", "piezo", "--config", kDir + "/fig6.cfg", "--format", "json"});
    REQUIRE(p.code == 0);
    CHECK(p.out.find("A_max") != std::string::npos);
    auto m = run({"dimension", "plates", "--config", kDir + "/fig8.cfg", "--format", "json"});
    REQUIRE(m.code == 0);
    auto row = nlohmann::json::parse(m.out)["rows"][0];
    CHECK(row["approx_t_bar"].get<double>() == Approx(96e-6).margin(2e-6));
}

TEST_CASE("materials and delayed commands", "[cli]") {
    auto m = run({"materials", "list", "--format", "csv"});
    REQUIRE(m.code == 0);
    CHECK(m.out.find("aluminium") != std::string::npos);
    CHECK(m.out.find("PIC-153") != std::string::npos);
    auto d = run({"delayed", "--config", kDir + "/delayed.cfg", "--delays", "0us:4us:5"});
    REQUIRE(d.code == 0);
    CHECK(lines(d.out).size() == 6);
}

TEST_CASE("oracle command", "[cli]") {
    auto r = run({"oracle", "dp-numeric", "--lattice", "6", "--ds-sigma", "0.1,20", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() == 3);
    auto cap = run({"oracle", "dp-numeric", "--lattice", "21"});
    CHECK(cap.code == cli::domain_error);
}

TEST_CASE("output file option", "[cli]") {
    std::string path = temp_config("dpcollapse_out.csv", "");
    auto r = run({"--output", path, "--format", "csv", "reduce", "--config", kDir + "/fig6.cfg"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("t_bar_c[s]") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("error classes map to distinct exit codes", "[cli]") {
    CHECK(run({}).code == cli::usage);
    CHECK(run({"frobnicate"}).code == cli::usage);
    CHECK(run({"reduce"}).code == cli::config_error);

    auto bad_key = temp_config("dpcollapse_bad_key.cfg", "diode2.V_E = 20 V\nwhatever = 1\n");
    auto r = run({"reduce", "--config", bad_key});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.find("line 2") != std::string::npos);

    CHECK(run({"--horizon", "5 mm", "reduce", "--config", kDir + "/fig6.cfg"}).code == cli::config_error);
    CHECK(run({"signalling", "--tbar", "5 mm"}).code == cli::dimension_error);
    CHECK(run({"signalling", "--pqe2", "1.5"}).code == cli::domain_error);
    CHECK(run({"--horizon", "1 ns", "reduce", "--config", kDir + "/fig6.cfg"}).code == cli::no_reduction);
    CHECK(run({"--format", "xml", "reduce", "--config", kDir + "/fig6.cfg"}).code == cli::usage);
    std::remove(bad_key.c_str());
}

TEST_CASE("exit code table", "[cli]") {
    CHECK(cli::exit_code_for(ConfigError("k", 1, "x")) == 3);
    CHECK(cli::exit_code_for(DimensionError("x")) == 4);
    CHECK(cli::exit_code_for(DomainError("x")) == 5);
    CHECK(cli::exit_code_for(ConvergenceError("x", 0.1)) == 6);
    CHECK(cli::exit_code_for(NoReductionError("x")) == 7);
    CHECK(cli::exit_code_for(MonotonicityError("x")) == 8);
    CHECK(cli::exit_code_for(std::runtime_error("x")) == 1);
}
