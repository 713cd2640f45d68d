#include "doctest.h"

#include <cmath>
#include <limits>

#include "nvsigma/report.hpp"

using namespace nvsigma;

TEST_CASE("report checks and JSON layout") {
    Report r;
    r.at_most("small", 1e-9, 1e-8);
    r.near("charge", 2.0000001, 2.0, 1e-5);
    r.at_least("control", 0.5, 1e-2);
    r.flag("ok", true);
    CHECK(r.all_pass());
    const auto j = r.to_json();
    CHECK(j.begin().key() == "small");
    CHECK(j["charge"]["value"].get<double>() == 2.0000001);
    CHECK(j["charge"]["pass"].get<bool>());

    r.at_most("nan", std::numeric_limits<double>::quiet_NaN(), 1.0);
    CHECK_FALSE(r.all_pass());
    CHECK(r.to_json()["nan"]["value"].is_null());
    Report s;
    s.near("off", 2.1, 2.0, 1e-5);
    CHECK_FALSE(s.all_pass());
}
