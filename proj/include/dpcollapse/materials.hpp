#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpcollapse/quantities.hpp"

namespace dpcollapse {

struct Material {
    std::string name;
    MassDensity rho;
    Length g_bar;                  // mean lattice constant
    Length sigma_n;                // nuclear spatial variation
    FrequencyPerVolume tbar_g_over_hbar;
    double q_hat = 1.0;            // 1 for single-element solids
    Mass m_bar;
    Temperature theta_debye;
    Velocity sound_speed_longitudinal;

    // electrical / mechanical extras, present only where relevant
    std::optional<LengthPerVoltage> d33;
    std::optional<double> eps_r;
    std::optional<Pressure> elastic_modulus;
    std::optional<Resistivity> resistivity;
};

/// Characteristic DP energy density over hbar: G q rho^2 g^3 / (sqrt(pi) sigma_n hbar).
FrequencyPerVolume tbar_g(MassDensity rho, double q_hat, Length g_bar, Length sigma_n);

/// Nuclear spread from the Debye temperature: sqrt(3 kB T / m) * hbar / (kB Theta_D).
Length sigma_n_from_debye(Temperature T, Mass m_bar, Temperature theta_debye);

class MaterialDatabase {
public:
    MaterialDatabase() = default;

    /// Parse the record format. `origin` is used in error messages.
    static MaterialDatabase parse(std::string_view text, std::string_view origin = "<text>");
    static MaterialDatabase load_file(const std::string& path);

    /// Built-in table, overlaid by the file named in DPCOLLAPSE_MATERIALS if set.
    static const MaterialDatabase& standard();

    /// Records of `other` replace same-named records here; new ones are appended.
    void merge(const MaterialDatabase& other);

    const Material& get(std::string_view name) const;
    const Material* find(std::string_view name) const;
    const std::vector<Material>& all() const { return items_; }

private:
    void merge_one(Material m);

    std::vector<Material> items_;
};

/// The compiled-in table (data/materials.db).
std::vector<Material> builtin_materials();
std::string_view builtin_materials_text();

}  // namespace dpcollapse
