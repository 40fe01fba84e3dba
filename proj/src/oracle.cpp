#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "dpcollapse/dpenergy.hpp"

namespace dpcollapse {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// Gravitational pair kernel of two identical Gaussian clouds of width s at
// distance r: erf(r / 2s) / r, which tends to 1/(s sqrt(pi)) at contact.
double kernel(double r, double s) {
    if (r < 1e-4 * s) return (1.0 - r * r / (12.0 * s * s)) / (s * kSqrtPi);
    return std::erf(r / (2.0 * s)) / r;
}

// Sum over one x-offset slab of the lattice-offset grid.
double slab_sum(int ox, const LatticeSpec& L, const std::array<double, 3>& d) {
    const auto [nx, ny, nz] = L.dimensions;
    const double g = L.lattice_constant.si(), s = L.sigma_n.si();
    double acc = 0.0;
    const double cx = nx - std::abs(ox);
    const double x = ox * g;
    for (int oy = -ny + 1; oy < ny; ++oy) {
        const double cxy = cx * (ny - std::abs(oy));
        const double y = oy * g;
        for (int oz = -nz + 1; oz < nz; ++oz) {
            const double z = oz * g;
            const double r0 = std::sqrt(x * x + y * y + z * z);
            const double rp = std::hypot(x + d[0], y + d[1], z + d[2]);
            const double rm = std::hypot(x - d[0], y - d[1], z - d[2]);
            const double f = kernel(r0, s) - 0.5 * kernel(rp, s) - 0.5 * kernel(rm, s);
            acc += cxy * (nz - std::abs(oz)) * f;
        }
    }
    return acc;
}

}  // namespace

Volume LatticeSpec::volume() const {
    return cubic_meters(double(nuclei()) * std::pow(lattice_constant.si(), 3));
}

MassDensity LatticeSpec::density() const {
    return kg_per_m3(nucleus_mass.si() / std::pow(lattice_constant.si(), 3));
}

LatticeSpec lattice_for(const Material& m, std::array<int, 3> dims) {
    LatticeSpec L;
    L.dimensions = dims;
    L.lattice_constant = m.g_bar;
    L.nucleus_mass = kilograms(m.rho.si() * std::pow(m.g_bar.si(), 3));
    L.sigma_n = m.sigma_n;
    return L;
}

Energy dp_energy_numeric_oracle(const LatticeSpec& L, const std::array<Length, 3>& ds,
                                int threads) {
    for (int n : L.dimensions)
        if (n < 1) throw DomainError("lattice dimensions must be at least 1");
    if (L.nuclei() > L.max_nuclei)
        throw DomainError("lattice has " + std::to_string(L.nuclei()) + " nuclei; the cap is " +
                          std::to_string(L.max_nuclei));
    if (!(L.lattice_constant.si() > 0) || !(L.sigma_n.si() > 0) || !(L.nucleus_mass.si() > 0))
        throw DomainError("lattice constant, sigma_n and nucleus mass must be positive");

    // The N^2 pair sum only depends on the lattice offset between two nuclei,
    // so it is regrouped by offset with multiplicity prod(n_k - |o_k|).
    const std::array<double, 3> d{ds[0].si(), ds[1].si(), ds[2].si()};
    if (d[0] == 0 && d[1] == 0 && d[2] == 0) return joules(0.0);
    const int nx = L.dimensions[0];
    std::vector<double> partial(std::size_t(2 * nx - 1), 0.0);
    auto work = [&](int first, int stride) {
        for (int i = first; i < 2 * nx - 1; i += stride) partial[std::size_t(i)] = slab_sum(i - nx + 1, L, d);
    };
    threads = std::max(1, std::min(threads, 2 * nx - 1));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& th : pool) th.join();
    }
    double sum = 0.0;
    for (double p : partial) sum += p;   // fixed order, independent of thread count

    const double m = L.nucleus_mass.si();
    return joules(kConstants.G * m * m * sum);
}

}  // namespace dpcollapse
