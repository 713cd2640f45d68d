#include "doctest.h"

#include <filesystem>

#include "nvsigma/harmonic.hpp"
#include "nvsigma/nv.hpp"
#include "support.hpp"

using namespace nvsigma;
using testing::pi;

namespace {

const EllipticLattice& square() {
    static const EllipticLattice lat({0.0, 1.0});
    return lat;
}

std::pair<GridFunction, GridFunction> homogeneous_samples(const InstantonData& d, const TorusShape& s) {
    GridFunction num(s), den(s);
    for (int k = 0; k < s.ny; ++k)
        for (int j = 0; j < s.nx; ++j) {
            const Complex z = double(j) / s.nx + s.tau * (double(k) / s.ny);
            std::tie(num(j, k), den(j, k)) = instanton_homogeneous(square(), d, z);
        }
    return {num, den};
}

struct Instanton64 {
    SphereMap m;
    GridFunction u;
    BlochWave w; // self-dual
};

const Instanton64& instanton64() {
    static const Instanton64 inst = [] {
        const TorusShape s({0.0, 1.0}, 64, 64);
        auto m = instanton_map(square(), testing::symmetric_l2(), s);
        auto u = potential(m);
        auto w = self_dualize(bloch_wave(u, 8)).first;
        return Instanton64{m, u, w};
    }();
    return inst;
}

double imag_max(const GridFunction& f) { return f.values().imag().abs().maxCoeff(); }

} // namespace

TEST_CASE("stereographic projection") {
    const TorusShape s({0.0, 1.0}, 8, 8);
    auto at = [&](Complex v) {
        const auto m = stereographic(GridFunction::constant(s, v));
        return std::array<Complex, 3>{m.q[0](0, 0), m.q[1](0, 0), m.q[2](0, 0)};
    };
    auto close = [](std::array<Complex, 3> a, std::array<double, 3> b) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i) e = std::max(e, std::abs(a[i] - b[i]));
        return e < 1e-15;
    };
    CHECK(close(at(0.0), {0, 0, 1}));
    CHECK(close(at(1.0), {1, 0, 0}));
    CHECK(close(at(Complex(0, 1)), {0, 1, 0}));
    CHECK(close(at(1e200), {0, 0, -1}));

    std::mt19937 rng(31);
    const auto v = testing::random_field(s, rng, 2);
    const auto m = stereographic(v);
    CHECK(m.is_real);
    CHECK(m.norm_defect() < 1e-14);
    CHECK(m.imag_defect() == 0.0);
    const auto h = stereographic(v * 2.0, GridFunction::constant(s, 2.0));
    for (int i = 0; i < 3; ++i) CHECK((h.q[i] - m.q[i]).max_abs() < 1e-14);
    const auto inf = stereographic(GridFunction::constant(s, 1.0), GridFunction(s));
    CHECK((inf.q[2] + 1.0).max_abs() == 0.0);
}

TEST_CASE("instanton potential and Schrodinger equation") {
    const auto& inst = instanton64();
    const auto exact = instanton_potential_exact(square(), testing::symmetric_l2(), inst.m.shape());
    CHECK((inst.u - exact).max_abs() < 1e-8 * exact.max_abs());
    CHECK(imag_max(inst.u) < 1e-10 * inst.u.max_abs());
    CHECK(inst.m.norm_defect() < 1e-12);
    CHECK(schrodinger_residual(inst.m, inst.u) < 1e-8);

    // u of a smooth non-harmonic map does not solve the equation
    std::mt19937 rng(32);
    const auto bent = stereographic(testing::random_field(inst.m.shape(), rng, 1));
    CHECK(schrodinger_residual(bent, potential(bent)) > 1e-2);
}

TEST_CASE("moments, w_m order and the moment recursion") {
    const auto& inst = instanton64();
    const auto T = moments(inst.m, 6);
    CHECK((T[0] - 1.0).max_abs() < 1e-12);
    const auto rel = relative_moments(inst.m, 6);
    for (int i = 1; i <= 6; ++i) CHECK(rel[i] < 1e-6);
    const auto wm = wm_order(inst.m, 3, 1e-6);
    CHECK(wm.infinite);

    std::mt19937 rng(33);
    const auto bent = stereographic(testing::random_field(inst.m.shape(), rng, 1));
    const auto wb = wm_order(bent, 3);
    CHECK_FALSE(wb.infinite);
    CHECK(wb.m == 1);

    for (int i = 3; i <= 5; ++i) CHECK(moment_recursion_residual(T, inst.u, i) < 1e-6);
    const auto f = fermi_moments(inst.w, 1, 6);
    for (int i = 4; i <= 6; ++i) CHECK(moment_recursion_residual(f, inst.u, i) < 1e-8);
    // a table that does not come from u fails the recursion
    MomentTable bad = T;
    bad[2] = bad[2] + GridFunction::sample(inst.m.shape(), [](double x, double) { return Complex(std::sin(2 * pi * x)); });
    CHECK(moment_recursion_residual(bad, inst.u, 3) > 1e-3);
}

TEST_CASE("NV constraint pairing") {
    const auto& inst = instanton64();
    CHECK(constraint_pairing(inst.m, inst.w, 1, 6) < 1e-6);
    CHECK(constraint_pairing(inst.m, inst.w, 2, 6) < 1e-6);
}

TEST_CASE("linearized operator") {
    const auto& inst = instanton64();
    const auto& q = inst.m.q;
    // infinitesimal rotation V = A q with A antisymmetric
    const double a12 = 0.3, a13 = -0.7, a23 = 0.4;
    std::vector<GridFunction> rot = {a12 * q[1] + a13 * q[2], -a12 * q[0] + a23 * q[2],
                                     -a13 * q[0] - a23 * q[1]};
    CHECK(linearized_residual(inst.m, rot) < 1e-7);
    std::vector<GridFunction> tx, ty;
    for (const auto& c : q) {
        tx.push_back(torus::dx(c));
        ty.push_back(torus::dy(c));
    }
    CHECK(linearized_residual(inst.m, tx) < 1e-7);
    CHECK(linearized_residual(inst.m, ty) < 1e-7);
    std::mt19937 rng(34);
    std::vector<GridFunction> rnd;
    for (int i = 0; i < 3; ++i) rnd.push_back(testing::random_field(q[0].shape(), rng, 2));
    CHECK(linearized_residual(inst.m, rnd) > 1e-2);
}

TEST_CASE("instanton charge") {
    CHECK(instanton_charge(instanton64().m) == doctest::Approx(2.0).epsilon(1e-6));
    const TorusShape s({0.0, 1.0}, 64, 64);
    auto l3 = testing::skewed_l3();
    const auto m3 = instanton_map(square(), l3, s);
    CHECK(instanton_charge(m3) == doctest::Approx(3.0).epsilon(1e-4));
    const auto flat = stereographic(GridFunction::constant(s, {0.3, 0.2}));
    CHECK(std::abs(instanton_charge(flat)) < 1e-14);
}

TEST_CASE("fractional linear maps leave u unchanged") {
    const TorusShape s({0.0, 1.0}, 32, 32);
    const auto d = testing::symmetric_l2();
    const auto u = potential(instanton_map(square(), d, s));
    const Complex c = std::polar(0.6, 0.4), dd = std::polar(0.8, -1.1);
    const auto m = instanton_map(square(), d, s, std::pair{c, dd});
    CHECK((potential(m) - u).max_abs() < 1e-8 * u.max_abs());
    // the map itself does change
    CHECK((m.q[2] - instanton_map(square(), d, s).q[2]).max_abs() > 1e-2);
}

TEST_CASE("O(3) reconstruction chain") {
    const TorusShape s({0.0, 1.0}, 32, 32);
    const auto [num, den] = homogeneous_samples(testing::symmetric_l2(), s);
    const Complex r1 = 0.6, r2 = 0.7, r3 = std::sqrt(0.15);
    const auto [f1, f2] = f_from_v(num, den, r1, r2);
    const auto rep = o3_reconstruct(f1, f2, r1, r2, r3);
    CHECK(rep.worst() < 1e-8);
    CHECK(rep.y.norm_defect() < 1e-12);
    // y is the stereographic image of v
    const auto direct = stereographic(num, den);
    for (int i = 0; i < 3; ++i) CHECK((rep.y.q[i] - direct.q[i]).max_abs() < 1e-8);

    // r3 = 0 lands on the equator y3 = 0
    const Complex e1 = 0.6, e2 = 0.8;
    const auto [g1, g2] = f_from_v(num, den, e1, e2);
    const auto eq = o3_reconstruct(g1, g2, e1, e2, 0.0);
    CHECK(eq.y.q[2].max_abs() == 0.0);
    CHECK(eq.unit_norm < 1e-12);

    std::mt19937 rng(35);
    CHECK_THROWS_AS(o3_reconstruct(testing::random_field(s, rng, 1), testing::random_field(s, rng, 1), r1, r2, r3),
                    FGViolation);
    CHECK_THROWS_AS(o3_reconstruct(f1, f2, r1, r2, 0.5), FGViolation);
}

TEST_CASE("sphere map files round trip") {
    const TorusShape s({0.1, 0.9}, 8, 8);
    std::mt19937 rng(36);
    const auto m = stereographic(testing::random_field(s, rng, 1));
    const auto dir = std::filesystem::temp_directory_path() / "nvsigma_map_test";
    std::filesystem::create_directories(dir);
    const auto r = read_map(write_map(m, dir / "map"));
    CHECK(r.N() == 3);
    CHECK(r.is_real == m.is_real);
    for (int i = 0; i < 3; ++i) CHECK((r.q[i] - m.q[i]).max_abs() == 0.0);
    std::filesystem::remove_all(dir);
}
