#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dpcollapse/dpenergy.hpp"

using namespace dpcollapse;
using Catch::Approx;

namespace {

const double kG = 6.67430e-11;
const double kHbar = 1.054571817e-34;

const Material& al() { return MaterialDatabase::standard().get("aluminium"); }
const Material& pic() { return MaterialDatabase::standard().get("PIC-153"); }

PlateSpec fig6_plate() {
    return {PlateKind::displaced, square_meters(M_PI * 1.5e-3 * 1.5e-3), meters(1e-4), al()};
}

double tbar_v(const PlateSpec& p) { return p.material.tbar_g_over_hbar.si() * kHbar * p.volume().si(); }

}  // namespace

TEST_CASE("geometric function values", "[dpenergy]") {
    const double sp = std::sqrt(M_PI);
    CHECK(geometric_function(PlateKind::displaced, 10.0) == Approx(1.0 - sp / 10.0).epsilon(1e-14));
    CHECK(geometric_function(PlateKind::displaced, 10.0) == Approx(0.8228).margin(1e-4));
    double ext = 1.0 - (2.0 + sp / 2.0 - sp * std::log(4.0)) / 10.0 - sp * std::log(10.0) / 10.0;
    CHECK(geometric_function(PlateKind::extended, 10.0) == Approx(ext).epsilon(1e-14));
    CHECK(geometric_function(PlateKind::extended, 10.0) == Approx(0.5490).margin(1e-4));
    CHECK(geometric_function(PlateKind::displaced, 1e9) == Approx(1.0).margin(1e-8));
    CHECK(geometric_function(PlateKind::extended, 1e12) == Approx(1.0).margin(1e-10));
}

TEST_CASE("geometric function rejects the quadratic regime", "[dpenergy]") {
    CHECK_THROWS_AS(geometric_function(PlateKind::displaced, 4.0), DomainError);
    CHECK_THROWS_AS(geometric_function(PlateKind::extended, 0.5), DomainError);
}

TEST_CASE("long-distance energy of the aluminium plate", "[dpenergy]") {
    auto p = fig6_plate();
    double V = M_PI * 1.5e-3 * 1.5e-3 * 1e-4;
    double expect = 2 * M_PI * kG * V * 2700.0 * 2700.0 * 60e-10 * 60e-10;
    auto e = dp_energy_plate(p, meters(60e-10), false);
    CHECK(e.si() == Approx(expect).epsilon(1e-12));
    CHECK(e.si() / kHbar == Approx(7.4e5).epsilon(0.01));
    CHECK(dp_energy_plate(p, meters(0), true).si() == 0.0);
    auto e2 = dp_energy_plate(p, meters(120e-10), false);
    CHECK(e2.si() / e.si() == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("extended plate carries a third of the displaced energy", "[dpenergy]") {
    auto d = fig6_plate();
    auto x = d;
    x.kind = PlateKind::extended;
    CHECK(dp_energy_long_distance(x, meters(1e-8)).si() ==
          Approx(dp_energy_long_distance(d, meters(1e-8)).si() / 3.0).epsilon(1e-14));
}

TEST_CASE("short-distance branches", "[dpenergy]") {
    auto p = fig6_plate();
    double s = p.material.sigma_n.si();
    CHECK(dp_energy_short_distance(p, meters(0)).si() == 0.0);
    auto small = dp_energy_short_distance(p, meters(s / 10));
    CHECK(small.si() / tbar_v(p) == Approx(8.33e-4).epsilon(1e-3));
    CHECK(small.si() / tbar_v(p) == Approx(0.01 / 12).epsilon(1e-12));
    auto far = dp_energy_short_distance(p, meters(1e8 * s));
    CHECK(far.si() / tbar_v(p) == Approx(1.0).epsilon(1e-7));
    auto at10 = dp_energy_short_distance(p, meters(10 * s));
    CHECK(at10.si() / tbar_v(p) == Approx(geometric_function(PlateKind::displaced, 10)).epsilon(1e-12));
}

TEST_CASE("short-distance blend zone is flagged, continuous and monotone", "[dpenergy]") {
    for (auto kind : {PlateKind::displaced, PlateKind::extended}) {
        auto p = fig6_plate();
        p.kind = kind;
        double s = p.material.sigma_n.si();
        CHECK_FALSE(dp_energy_short_distance_detail(p, meters(0.5 * s)).blended);
        CHECK(dp_energy_short_distance_detail(p, meters(2.0 * s)).blended);
        CHECK_FALSE(dp_energy_short_distance_detail(p, meters(5.0 * s)).blended);
        double prev = 0;
        const double step = 1e-3;
        for (double x = step; x < 8.0; x += step) {
            double e = dp_energy_short_distance(p, meters(x * s)).si() / tbar_v(p);
            CHECK(e >= prev);
            // no jumps at the branch joins
            CHECK(e - prev < 1e-3);
            prev = e;
        }
    }
}

TEST_CASE("plate energy is positive away from zero", "[dpenergy]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lg(-14, -6);
    auto p = fig6_plate();
    for (int i = 0; i < 200; ++i) {
        double ds = std::pow(10.0, lg(rng));
        CHECK(dp_energy_plate(p, meters(ds), true).si() > 0);
        CHECK(dp_energy_plate(p, meters(ds), false).si() > 0);
    }
    CHECK_THROWS_AS(dp_energy_plate(p, meters(-1e-10), false), DomainError);
}

TEST_CASE("piezo capacitor energy is the sum of its plates", "[dpenergy]") {
    auto spec = make_piezo_capacitor(pic(), al(), square_meters(M_PI * 2.25e-6), meters(2e-4), meters(1e-4));
    for (bool sd : {false, true}) {
        for (double ds : {1e-12, 3e-11, 1e-9, 4.3e-9}) {
            double sum = dp_energy_plate(spec.piezo, meters(ds), sd).si() +
                         2 * dp_energy_plate(spec.plate, meters(ds), sd).si();
            double got = dp_energy_piezo_capacitor(spec, meters(ds), meters(0), sd).si();
            CHECK(got == Approx(sum).epsilon(1e-15));
            CHECK(dp_energy_piezo_capacitor(spec, meters(0), meters(ds), sd).si() == got);
        }
        CHECK(dp_energy_piezo_capacitor(spec, meters(4e-9), meters(4e-9), sd).si() == 0.0);
    }
}

TEST_CASE("piezo capacitor geometry is validated", "[dpenergy]") {
    CHECK_THROWS_AS(make_piezo_capacitor(pic(), al(), square_meters(0), meters(2e-4), meters(1e-4)),
                    DomainError);
    auto spec = make_piezo_capacitor(pic(), al(), square_meters(1e-5), meters(2e-4), meters(1e-4));
    spec.plate.area = square_meters(2e-5);
    CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("thin-plate warning", "[dpenergy]") {
    auto thick = make_movable_plates(al(), square_meters(1e-8), meters(1e-3));
    CHECK_FALSE(thick.warnings().empty());
    auto thin = make_movable_plates(al(), square_meters(4e-6), meters(1e-4));
    CHECK(thin.warnings().empty());
}
