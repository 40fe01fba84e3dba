#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dpcollapse/dpenergy.hpp"

using namespace dpcollapse;
using Catch::Approx;

namespace {

const double kG = 6.67430e-11;

const Material& al() { return MaterialDatabase::standard().get("aluminium"); }

// Potential (per G m) at distance r of a spherical Gaussian cloud of width w,
// by direct radial integration of the enclosed mass. Two Gaussians of width s
// interact like a point and a Gaussian of width sqrt(2) s.
double gaussian_potential(double r, double w) {
    using boost::math::quadrature::gauss_kronrod;
    const double norm = std::pow(2 * M_PI * w * w, -1.5);
    auto rho = [&](double x) { return norm * std::exp(-x * x / (2 * w * w)); };
    auto inner = [&](double x) { return 4 * M_PI * x * x * rho(x); };
    auto outer = [&](double x) { return 4 * M_PI * x * rho(x); };
    double enclosed = r > 0 ? gauss_kronrod<double, 31>::integrate(inner, 0.0, r, 15, 1e-14) : 0.0;
    double beyond = gauss_kronrod<double, 31>::integrate(outer, r, r + 40 * w, 15, 1e-14);
    return (r > 0 ? enclosed / r : 0.0) + beyond;
}

// E(ds) of one nucleus against its displaced copy
double single_pair(double m, double s, double ds) {
    double w = std::sqrt(2.0) * s;
    return kG * m * m * (gaussian_potential(0, w) - gaussian_potential(ds, w));
}

LatticeSpec single(double m, double s) {
    LatticeSpec L;
    L.dimensions = {1, 1, 1};
    L.lattice_constant = meters(2.55e-10);
    L.nucleus_mass = kilograms(m);
    L.sigma_n = meters(s);
    return L;
}

std::array<Length, 3> along_diagonal(double ds) {
    double c = ds / std::sqrt(3.0);
    return {meters(c), meters(c), meters(c)};
}

}  // namespace

TEST_CASE("oracle is zero without displacement", "[oracle]") {
    auto L = lattice_for(al(), {6, 6, 6});
    CHECK(dp_energy_numeric_oracle(L, {}).si() == 0.0);
}

TEST_CASE("single pair reaches the Gaussian self-energy limit", "[oracle]") {
    const double m = 4.48e-26, s = 1e-11;
    auto L = single(m, s);
    double limit = kG * m * m / (std::sqrt(M_PI) * s);
    double e = dp_energy_numeric_oracle(L, {meters(1e8 * s), meters(0), meters(0)}).si();
    CHECK(std::abs(e / limit - 1.0) < 1e-6);
    CHECK(gaussian_potential(0, std::sqrt(2.0) * s) * kG * m * m == Approx(limit).epsilon(1e-10));
}

TEST_CASE("single pair matches the radial integral at every separation", "[oracle]") {
    const double m = 4.48e-26, s = 1e-11;
    auto L = single(m, s);
    for (double x : {0.05, 0.3, 1.0, 2.0, 4.0, 10.0, 30.0}) {
        double e = dp_energy_numeric_oracle(L, {meters(0), meters(x * s), meters(0)}).si();
        INFO("ds/sigma = " << x);
        CHECK(e == Approx(single_pair(m, s, x * s)).epsilon(1e-8));
    }
}

TEST_CASE("lattice energy rises quadratically at small displacement", "[oracle]") {
    auto L = lattice_for(al(), {12, 12, 12});
    const double s = L.sigma_n.si();
    std::vector<double> lx, ly;
    for (int k = 0; k <= 10; ++k) {
        double x = 0.01 * std::pow(10.0, k / 10.0);
        lx.push_back(std::log(x));
        ly.push_back(std::log(dp_energy_numeric_oracle(L, along_diagonal(x * s)).si()));
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
    CHECK(sxy / sxx == Approx(2.0).margin(0.02));
}

TEST_CASE("lattice energy follows both short-distance branches", "[oracle]") {
    auto L = lattice_for(al(), {12, 12, 12});
    const double s = L.sigma_n.si(), m = L.nucleus_mass.si();
    const double tv = double(L.nuclei()) * kG * m * m / (std::sqrt(M_PI) * s);
    for (double x : {0.01, 0.05, 0.1, 0.5}) {
        double e = dp_energy_numeric_oracle(L, along_diagonal(x * s)).si();
        CHECK(e / (tv * x * x / 12.0) == Approx(1.0).margin(0.15));
    }
    for (double x : {12.0, 15.0, 20.0}) {
        double e = dp_energy_numeric_oracle(L, along_diagonal(x * s)).si();
        CHECK(e / tv == Approx(1.0).margin(0.15));
    }
}

TEST_CASE("lattice saturation agrees with the material's tbar_g", "[oracle]") {
    auto L = lattice_for(al(), {12, 12, 12});
    auto T = tbar_g(L.density(), 1.0, L.lattice_constant, L.sigma_n);
    double tv = T.si() * kConstants.hbar * L.volume().si();
    double e = dp_energy_numeric_oracle(L, along_diagonal(20 * L.sigma_n.si())).si();
    CHECK(e / tv == Approx(1.0).margin(0.15));
}

TEST_CASE("slab oracle approaches the continuum slab as it widens", "[oracle]") {
    // Two uniform slabs of thickness d shifted by a <= d along their normal:
    // E = 2 pi G rho^2 A a^2 (d - a/3).
    const int nz = 4;
    double prev_gap = 1.0;
    for (int n : {4, 8, 12, 16, 20}) {
        auto L = lattice_for(al(), {n, n, nz});
        const double g = L.lattice_constant.si(), m = L.nucleus_mass.si(), s = L.sigma_n.si();
        const double a = 2.5 * g;
        double e = dp_energy_numeric_oracle(L, {meters(0), meters(0), meters(a)}).si();
        double saturated = double(L.nuclei()) * kG * m * m / (std::sqrt(M_PI) * s);
        double rho = L.density().si();
        double cont = 2 * M_PI * kG * rho * rho * (n * g) * (n * g) * a * a * (nz * g - a / 3);
        double gap = std::abs((e - saturated) / cont - 1.0);
        INFO("n = " << n);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("oracle refuses lattices above the cap", "[oracle]") {
    auto L = lattice_for(al(), {21, 20, 20});
    try {
        dp_energy_numeric_oracle(L, along_diagonal(1e-11));
        FAIL("expected a DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("8000") != std::string::npos);
    }
    L.dimensions = {0, 4, 4};
    CHECK_THROWS_AS(dp_energy_numeric_oracle(L, along_diagonal(1e-11)), DomainError);
}

TEST_CASE("oracle result does not depend on the thread count", "[oracle]") {
    auto L = lattice_for(al(), {12, 12, 12});
    auto ds = along_diagonal(3e-12);
    double one = dp_energy_numeric_oracle(L, ds, 1).si();
    for (int t : {2, 3, 8}) CHECK(dp_energy_numeric_oracle(L, ds, t).si() == one);
}
