#ifndef NVSIGMA_REPORT_HPP
#define NVSIGMA_REPORT_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace nvsigma {

/// Verification report {check: {value, tolerance, pass}} in insertion order.
class Report {
public:
    struct Check {
        std::string name;
        double value = 0.0;
        double tolerance = 0.0;
        bool pass = false;
    };

    /// Passes when value <= tolerance (NaN fails).
    void at_most(const std::string& name, double value, double tolerance);
    /// Passes when |value - target| <= tolerance; the stored value is the raw value.
    void near(const std::string& name, double value, double target, double tolerance);
    /// Passes when value >= threshold (negative controls).
    void at_least(const std::string& name, double value, double threshold);
    void flag(const std::string& name, bool ok);

    bool all_pass() const;
    const std::vector<Check>& checks() const { return checks_; }
    nlohmann::ordered_json to_json() const;

private:
    std::vector<Check> checks_;
};

} // namespace nvsigma

#endif // NVSIGMA_REPORT_HPP
