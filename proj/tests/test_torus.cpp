#include "doctest.h"

#include <sstream>

#include "nvsigma/torus.hpp"
#include "support.hpp"

using namespace nvsigma;
using testing::pi;

namespace {

// d/dz of a trigonometric polynomial from its x and y partials,
// d_z = (d_y - conj(tau) d_x) / (2 i tau2), evaluated mode by mode.
GridFunction dz_oracle(const TorusShape& s, const std::vector<testing::Mode>& modes, bool bar) {
    std::vector<testing::Mode> out;
    const Complex I{0.0, 1.0};
    const Complex t = bar ? s.tau : std::conj(s.tau);
    const double sg = bar ? -1.0 : 1.0;
    for (auto md : modes) {
        const Complex ddx = 2.0 * pi * I * double(md.m), ddy = 2.0 * pi * I * double(md.n);
        md.c *= sg * (ddy - t * ddx) / (2.0 * I * s.tau2());
        out.push_back(md);
    }
    return testing::from_modes(s, out);
}

} // namespace

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(TorusShape({0.0, 1.0}, 7, 8), InvalidShape);
    CHECK_THROWS_AS(TorusShape({0.0, 1.0}, 6, 8), InvalidShape);
    CHECK_THROWS_AS(TorusShape({0.3, -1.0}, 8, 8), InvalidShape);
    CHECK_NOTHROW(TorusShape({0.3, 0.9}, 8, 10));
    const TorusShape a({0.0, 1.0}, 8, 8), b({0.0, 1.0}, 16, 8);
    CHECK_THROWS_AS(GridFunction(a) + GridFunction(b), ShapeMismatch);
}

TEST_CASE("complex derivative of an exponential") {
    const TorusShape s({0.0, 1.0}, 16, 16);
    auto e = GridFunction::sample(s, [](double x, double) { return std::exp(Complex(0, 2 * pi * x)); });
    const auto d = torus::complex_derivative(e, torus::Dir::z);
    CHECK((d - Complex(0.0, pi) * e).max_abs() < 1e-12);
    const auto c = GridFunction::constant(s, {2.0, -1.0});
    CHECK(torus::complex_derivative(c, torus::Dir::z).max_abs() < 1e-14);
    CHECK(torus::complex_derivative(c, torus::Dir::zbar).max_abs() < 1e-14);
}

TEST_CASE("spectral derivatives match the mode-by-mode oracle") {
    std::mt19937 rng(11);
    const TorusShape s({0.31, 1.17}, 24, 20);
    const auto modes = testing::random_modes(rng, 4);
    const auto f = testing::from_modes(s, modes);
    const double scale = f.max_abs();
    CHECK((torus::complex_derivative(f, torus::Dir::z) - dz_oracle(s, modes, false)).max_abs() <
          1e-12 * scale * 50);
    CHECK((torus::complex_derivative(f, torus::Dir::zbar) - dz_oracle(s, modes, true)).max_abs() <
          1e-12 * scale * 50);

    const auto dzf = torus::complex_derivative(f, torus::Dir::z);
    const auto dbf = torus::complex_derivative(f, torus::Dir::zbar);
    CHECK((dzf + dbf - torus::dx(f)).max_abs() < 1e-12 * torus::dx(f).max_abs());
    CHECK(std::abs(torus::torus_mean(dzf)) < 1e-12 * f.max_abs());
    CHECK(std::abs(torus::torus_mean(dbf)) < 1e-12 * f.max_abs());

    const auto a = torus::complex_derivative(dzf, torus::Dir::zbar);
    const auto b = torus::complex_derivative(dbf, torus::Dir::z);
    CHECK((a - b).max_abs() < 1e-12 * a.max_abs());
    CHECK((torus::derivative(f, 1, 1) - a).max_abs() < 1e-12 * a.max_abs());

    const auto all = torus::z_derivatives(f, 3);
    REQUIRE(all.size() == 4);
    CHECK((all[2] - torus::derivative(f, 2, 0)).max_abs() < 1e-12 * all[2].max_abs());
}

TEST_CASE("torus mean") {
    const TorusShape s({0.2, 0.8}, 12, 10);
    CHECK(std::abs(torus::torus_mean(GridFunction::constant(s, {1.5, 2.0})) - Complex(1.5, 2.0)) <
          1e-15);
    auto e = GridFunction::sample(s, [](double x, double y) { return std::exp(Complex(0, 2 * pi * (2 * x - 3 * y))); });
    CHECK(std::abs(torus::torus_mean(e)) < 1e-15);
    auto f = GridFunction::sample(s, [](double x, double) { return 3.0 + std::exp(Complex(0, 2 * pi * x)); });
    CHECK(std::abs(torus::torus_mean(f) - 3.0) < 1e-14);
}

TEST_CASE("solve_dzbar") {
    const TorusShape s({0.25, 1.1}, 16, 16);
    CHECK(torus::solve_dzbar(GridFunction(s)).max_abs() == 0.0);

    const int m = 2, n = -1;
    auto g = GridFunction::sample(s, [&](double x, double y) { return std::exp(Complex(0, 2 * pi * (m * x + n * y))); });
    const Complex factor = -s.tau2() / (pi * (double(n) - s.tau * double(m)));
    CHECK((torus::solve_dzbar(g) - factor * g).max_abs() < 1e-13);

    std::mt19937 rng(3);
    auto h = testing::random_field(s, rng);
    h -= torus::torus_mean(h);
    const auto z = torus::solve_dzbar(h);
    CHECK((torus::complex_derivative(z, torus::Dir::zbar) - h).max_abs() < 1e-12 * h.max_abs());
    CHECK(std::abs(torus::torus_mean(z)) < 1e-14);
    auto k = testing::random_field(s, rng);
    const auto back = torus::solve_dzbar(torus::complex_derivative(k, torus::Dir::zbar));
    CHECK((back - (k - torus::torus_mean(k))).max_abs() < 1e-12 * k.max_abs());

    CHECK_THROWS_AS(torus::solve_dzbar(h + 1.0), NonZeroMean);
}

TEST_CASE("Nyquist modes are dropped by derivatives") {
    const TorusShape s({0.0, 1.0}, 8, 8);
    auto f = GridFunction::sample(s, [](double x, double) { return std::cos(2 * pi * 4 * x); });
    CHECK(torus::complex_derivative(f, torus::Dir::z).max_abs() < 1e-14);
}

TEST_CASE("chop, band_limit and spectral tail") {
    const TorusShape s({0.0, 1.0}, 32, 32);
    auto f = GridFunction::sample(s, [](double x, double y) {
        return std::cos(2 * pi * x) + 1e-9 * std::cos(2 * pi * 9 * y);
    });
    CHECK(torus::spectral_tail(f, 8) == doctest::Approx(1e-9).epsilon(1e-6));
    const auto c = torus::chop(f, 1e-6);
    CHECK(torus::spectral_tail(c, 8) < 1e-15);
    const auto b = torus::band_limit(f, 4);
    CHECK((b - GridFunction::sample(s, [](double x, double) { return Complex(std::cos(2 * pi * x)); })).max_abs() < 1e-14);
}

TEST_CASE("csv round trip") {
    std::mt19937 rng(5);
    const TorusShape s({0.125, 0.75}, 8, 10);
    const auto f = testing::random_field(s, rng, 2);
    std::stringstream ss;
    torus::write_csv(ss, f);
    std::string header;
    std::getline(ss, header);
    CHECK(header.rfind("# torus tau_re=", 0) == 0);
    ss.seekg(0);
    const auto g = torus::read_csv(ss);
    CHECK(g.shape() == s);
    CHECK((g - f).max_abs() == 0.0);

    std::stringstream bad("# torus tau_re=0 tau_im=1 nx=8 ny=8\n1,2\n");
    CHECK_THROWS_AS(torus::read_csv(bad), ParseError);
}
