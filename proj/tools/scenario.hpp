#ifndef NVSIGMA_TOOLS_SCENARIO_HPP
#define NVSIGMA_TOOLS_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvsigma/ecm.hpp"
#include "nvsigma/elliptic.hpp"
#include "nvsigma/torus.hpp"

namespace nvsigma::cli {

NVSIGMA_DEFINE_ERROR(SchemaError);

inline constexpr const char* schema_tag = "nv-sigma/1";

struct ModeSpec {
    int m = 0, n = 0;
    Complex c;
};

struct PotentialSpec {
    enum class Kind { constant, modes, instanton, csv } kind = Kind::constant;
    Complex value;                // constant
    std::vector<ModeSpec> modes;  // modes
    InstantonData instanton;      // instanton
    std::optional<std::pair<Complex, Complex>> rotation; // instanton, fractional-linear (c, d)
    std::filesystem::path csv;    // csv, relative to the scenario file
};

struct Scenario {
    std::filesystem::path path;
    Complex tau{0.0, 1.0};
    int grid = 64;
    int order = 8;
    int depth = 6;
    unsigned seed = 1;
    std::optional<PotentialSpec> potential;
    // flow
    int max_wavenumber = 0;
    double filter = 0.0;
    // ecm
    std::optional<ECMConfig> particles;
    std::optional<ECMIntegrals> integrals;
    // o3
    std::optional<std::array<Complex, 3>> r;
};

/// Reads and validates a scenario; unknown keys and malformed values throw SchemaError.
Scenario load_scenario(const std::filesystem::path& path);

/// Samples the scenario potential on the given grid.
GridFunction sample_potential(const Scenario& s, const TorusShape& shape);

/// "0.3", "-1.5i", "i", "0.2-0.7i", "1e-3+2i".
Complex parse_complex(const std::string& text);
/// Comma separated list of parse_complex values.
std::vector<Complex> parse_complex_list(const std::string& text);

nlohmann::json to_json(Complex z);

} // namespace nvsigma::cli

#endif
