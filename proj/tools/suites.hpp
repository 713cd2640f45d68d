#ifndef NVSIGMA_TOOLS_SUITES_HPP
#define NVSIGMA_TOOLS_SUITES_HPP

#include <string>

#include "json.hpp"
#include "nvsigma/report.hpp"
#include "scenario.hpp"

namespace nvsigma::cli {

struct SuiteOptions {
    int grid = 0;   // 0: take the scenario value
    int order = 0;  // 0: take the scenario value
    int steps = 20; // flow suite
    int moments = 6; // instanton suite: T_1..T_moments
    unsigned seed = 1;
};

inline nlohmann::ordered_json cjson(Complex z) { return nlohmann::ordered_json::array({z.real(), z.imag()}); }

Report run_suite(const std::string& suite, const Scenario& s, const SuiteOptions& opt);

/// Curve report {N, I, involution_residual, turning_table, cubic, cmsing, ...}.
/// turning_n > 0 adds the constraint table of that order.
nlohmann::ordered_json curve_report(const EllipticLattice& lat, const ECMIntegrals& I, int turning_n);

} // namespace nvsigma::cli

#endif
