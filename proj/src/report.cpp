#include "nvsigma/report.hpp"

#include <cmath>

namespace nvsigma {

void Report::at_most(const std::string& name, double value, double tolerance) {
    checks_.push_back({name, value, tolerance, value <= tolerance});
}

void Report::near(const std::string& name, double value, double target, double tolerance) {
    checks_.push_back({name, value, tolerance, std::abs(value - target) <= tolerance});
}

void Report::at_least(const std::string& name, double value, double threshold) {
    checks_.push_back({name, value, threshold, value >= threshold});
}

void Report::flag(const std::string& name, bool ok) {
    checks_.push_back({name, ok ? 1.0 : 0.0, 0.0, ok});
}

bool Report::all_pass() const {
    for (const auto& c : checks_)
        if (!c.pass) return false;
    return true;
}

nlohmann::ordered_json Report::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& c : checks_) {
        // JSON has no NaN/inf; report them as null so the file stays valid
        nlohmann::ordered_json v = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nullptr;
        j[c.name] = {{"value", v}, {"tolerance", c.tolerance}, {"pass", c.pass}};
    }
    return j;
}

} // namespace nvsigma
