#include "doctest.h"

#include "nvsigma/ecm.hpp"
#include "support.hpp"

using namespace nvsigma;

namespace {

const EllipticLattice& lattice() {
    static const EllipticLattice lat({0.12, 1.05});
    return lat;
}

ECMConfig config(int N, bool turning, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    ECMConfig c;
    for (int i = 0; i < N; ++i) {
        // spread along a diagonal so no two points coincide
        c.z.push_back(Complex(0.21 * i + 0.05 * U(rng), 0.17 * i + 0.05 * U(rng)));
        c.rho.push_back(turning ? Complex(0.0) : Complex(U(rng), U(rng)));
    }
    return c;
}

// elementary symmetric polynomial e_2 of the eigenvalues of L(alpha)
Complex e2_of_lax(const ECMConfig& c, Complex alpha) {
    const Eigen::VectorXcd ev = lax(lattice(), c, alpha).eigenvalues();
    Complex e2 = 0.0;
    for (int i = 0; i < ev.size(); ++i)
        for (int j = i + 1; j < ev.size(); ++j) e2 += ev(i) * ev(j);
    return e2;
}

const Complex alpha0{0.173, 0.291};

} // namespace

TEST_CASE("Lax matrix") {
    std::mt19937 rng(41);
    const auto& lat = lattice();
    ECMConfig one{{Complex(0.3, 0.1)}, {Complex(0.7, -0.2)}};
    const auto L1 = lax(lat, one, alpha0);
    CHECK(L1.rows() == 1);
    CHECK(std::abs(L1(0, 0) - one.rho[0]) == 0.0);
    CHECK(std::abs(charpoly_direct(lat, one, 0.9, alpha0) - (0.9 - one.rho[0])) < 1e-15);

    for (int N : {2, 3, 4}) {
        const auto c = config(N, true, rng);
        const Eigen::MatrixXcd s = lax(lat, c, -alpha0) + lax(lat, c, alpha0).transpose();
        CHECK(s.cwiseAbs().maxCoeff() < 1e-10);
    }
    const auto c2 = config(2, false, rng);
    const auto L = lax(lat, c2, alpha0);
    const Complex z12 = c2.z[0] - c2.z[1];
    CHECK(std::abs(L(0, 1) * L(1, 0) - (lat.wp(alpha0) - lat.wp(z12))) < 1e-9);
    CHECK_THROWS_AS(lax(lat, c2, 0.0), SingularAlpha);
    CHECK_THROWS_AS(lax(lat, c2, z12), SingularAlpha);
}

TEST_CASE("direct characteristic polynomial") {
    std::mt19937 rng(42);
    const auto& lat = lattice();
    const auto t2 = config(2, true, rng);
    const Complex z12 = t2.z[0] - t2.z[1];
    for (Complex k : {Complex(0.3, 0.2), Complex(-1.1, 0.4)})
        CHECK(std::abs(charpoly_direct(lat, t2, k, alpha0) - (k * k + lat.wp(z12) - lat.wp(alpha0))) < 1e-9);

    // monic of degree N
    const auto c = config(3, false, rng);
    const double K = 1e4;
    CHECK(std::abs(charpoly_direct(lat, c, K, alpha0) / (K * K * K) - 1.0) < 1e-3);

    // permuting the particles changes nothing
    ECMConfig p = c;
    std::swap(p.z[0], p.z[2]);
    std::swap(p.rho[0], p.rho[2]);
    CHECK(std::abs(charpoly_direct(lat, p, 0.4, alpha0) - charpoly_direct(lat, c, 0.4, alpha0)) <
          1e-10 * std::abs(charpoly_direct(lat, c, 0.4, alpha0)));
}

TEST_CASE("wp slope of the second coefficient") {
    std::mt19937 rng(43);
    for (int N : {2, 3, 4}) {
        const auto c = config(N, false, rng);
        // e_2(alpha) = A + B wp(alpha): fit A, B from several alphas
        const std::vector<Complex> alphas = {{0.11, 0.07}, {0.31, 0.22}, {0.17, 0.41}, {0.42, 0.13}, {0.23, 0.3}};
        Eigen::MatrixXcd M(alphas.size(), 2);
        Eigen::VectorXcd y(alphas.size());
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            M(i, 0) = 1.0;
            M(i, 1) = lattice().wp(alphas[i]);
            y(i) = e2_of_lax(c, alphas[i]);
        }
        const Eigen::VectorXcd ab = M.colPivHouseholderQr().solve(y);
        CHECK(std::abs(ab(1) + N * (N - 1) / 2.0) < 1e-8);
        CHECK((M * ab - y).cwiseAbs().maxCoeff() < 1e-8 * y.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("sigma derivative ratios") {
    const auto& lat = lattice();
    const auto s = sigma_derivative_ratios(lat, alpha0, 4);
    CHECK(std::abs(s[0] - 1.0) == 0.0);
    CHECK(std::abs(s[1] - lat.zeta(alpha0)) < 1e-13);
    // sigma''/sigma = zeta^2 - wp
    const Complex z = lat.zeta(alpha0);
    CHECK(std::abs(2.0 * s[2] - (z * z - lat.wp(alpha0))) < 1e-12 * std::abs(z * z));
    // finite-difference check of the third ratio
    const double h = 1e-3;
    const Complex d3 = (lat.sigma(alpha0 + 2 * h) - 2.0 * lat.sigma(alpha0 + h) + 2.0 * lat.sigma(alpha0 - h) -
                        lat.sigma(alpha0 - 2 * h)) / (2 * h * h * h);
    CHECK(std::abs(6.0 * s[3] - d3 / lat.sigma(alpha0)) < 1e-5 * std::abs(d3 / lat.sigma(alpha0)));
}

TEST_CASE("sigma representation of the spectral curve") {
    std::mt19937 rng(44);
    const auto& lat = lattice();
    ECMConfig one{{Complex(0.3, 0.1)}, {Complex(0.7, -0.2)}};
    ECMIntegrals I1{{-one.rho[0]}};
    for (Complex k : {Complex(0.5, 0.1), Complex(-2.0, 1.0)})
        CHECK(std::abs(charpoly_sigma(lat, I1, k, alpha0) - charpoly_direct(lat, one, k, alpha0)) < 1e-10);

    const auto t2 = config(2, true, rng);
    const Complex z12 = t2.z[0] - t2.z[1];
    ECMIntegrals I2{{0.0, lat.wp(z12)}};
    for (Complex k : {Complex(0.5, 0.1), Complex(-2.0, 1.0)}) {
        const Complex direct = charpoly_direct(lat, t2, k, alpha0);
        CHECK(std::abs(charpoly_sigma(lat, I2, k, alpha0) - direct) < 1e-8 * std::max(1.0, std::abs(direct)));
        CHECK(std::abs(charpoly_sigma(lat, I2, k, alpha0, +1) - direct) > 1e-3);
    }
    CHECK(std::abs(spectral_F(lat, I2, 0.3, alpha0) - lat.sigma(alpha0) * spectral_f(lat, I2, 0.3, alpha0)) < 1e-14);
}

TEST_CASE("fitting integrals") {
    std::mt19937 rng(45);
    const auto& lat = lattice();
    ECMConfig one{{Complex(0.3, 0.1)}, {Complex(0.7, -0.2)}};
    const auto f1 = fit_integrals(lat, one);
    CHECK(std::abs(f1.I.I[0] + one.rho[0]) < 1e-10);
    CHECK(f1.residual < 1e-10);

    const auto t2 = config(2, true, rng);
    const auto f2 = fit_integrals(lat, t2);
    CHECK(std::abs(f2.I.I[0]) < 1e-8);
    CHECK(std::abs(f2.I.I[1] - lat.wp(t2.z[0] - t2.z[1])) < 1e-8);
    CHECK(f2.residual < 1e-8);

    for (int N : {3, 4, 5}) {
        const auto f = fit_integrals(lat, config(N, true, rng));
        CHECK(f.residual < 1e-8);
        for (int l = 1; l <= N; l += 2) CHECK(std::abs(f.I.at(l)) < 1e-8);
    }

    // for N >= 3 only the reflected determinant has the sigma form
    const auto c4 = config(4, false, rng);
    const auto f4 = fit_integrals(lat, c4);
    const Complex k{0.3, -0.6};
    const Complex refl = charpoly_reflected(lat, c4, k, alpha0);
    CHECK(std::abs(charpoly_sigma(lat, f4.I, k, alpha0) - refl) < 1e-8 * std::abs(refl));
    CHECK(std::abs(charpoly_direct(lat, c4, k, alpha0) - refl) > 1e-3 * std::abs(refl));
    CHECK(std::abs(f4.I.at(1) + (c4.rho[0] + c4.rho[1] + c4.rho[2] + c4.rho[3])) < 1e-9);

    // round trip through the sigma form
    const auto f3 = fit_integrals(lat, config(3, false, rng));
    const auto again = fit_integrals_from(lat, 3, [&](Complex k, Complex a) { return charpoly_sigma(lat, f3.I, k, a); });
    for (int l = 1; l <= 3; ++l) CHECK(std::abs(again.I.at(l) - f3.I.at(l)) < 1e-9 * std::max(1.0, std::abs(f3.I.at(l))));
    CHECK(f3.I.at(0) == Complex(1.0));
    CHECK(f3.I.at(4) == Complex(0.0));
}

TEST_CASE("involution") {
    const auto& lat = lattice();
    CHECK(involution_residual(lat, ECMIntegrals{{0.0, Complex(0.4, 0.3)}}) < 1e-9);
    CHECK(involution_residual(lat, ECMIntegrals{{1.0, Complex(0.4, 0.3)}}) > 1e-1);
    CHECK(involution_residual(lat, ECMIntegrals{{0.0, Complex(-0.3, 1.2), 0.0, Complex(0.8, -0.5)}}) < 1e-8);
}

TEST_CASE("turning-point constraints and branch cubic") {
    const auto& lat = lattice();
    ECMIntegrals I2{{0.0, Complex(0.4, 0.3)}};
    const auto T2 = turning_table(lat, I2, 3);
    CHECK(std::abs(T2(0, 1) - 2.0) < 1e-10);
    CHECK(turning_defect(lat, I2, 1) > 1.0);
    CHECK_THROWS_AS(branch_cubic(lat, I2), ConstraintsNotMet);

    // even N: entries with i + j even vanish
    ECMIntegrals I4{{0.0, Complex(-0.3, 1.2), 0.0, Complex(0.8, -0.5)}};
    const auto T4 = turning_table(lat, I4, 5);
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; i + j <= 5; ++j)
            if ((i + j) % 2 == 0) CHECK(std::abs(T4(i, j)) < 1e-12 * std::max(1.0, T4.cwiseAbs().maxCoeff()));

    // the table is affine in I
    ECMIntegrals D{{0.0, Complex(0.2, -0.1), 0.0, Complex(-0.4, 0.3)}}, P = I4, Q = I4;
    for (int l = 0; l < 4; ++l) {
        P.I[l] += D.I[l];
        Q.I[l] += 2.0 * D.I[l];
    }
    const Eigen::MatrixXcd lin = (turning_table(lat, Q, 5) - T4) - 2.0 * (turning_table(lat, P, 5) - T4);
    CHECK(lin.cwiseAbs().maxCoeff() < 1e-12 * T4.cwiseAbs().maxCoeff());

    // N = 4 point cut out by the first constraints: I2 = 0, I4 = g2 / 2
    ECMIntegrals F{{0.0, 0.0, 0.0, lat.g2() / 2.0}};
    CHECK(turning_defect(lat, F, 1) < 1e-9);
    const auto cub = branch_cubic(lat, F);
    CHECK(cub.roots.size() == 3);
    CHECK_FALSE(cub.distinct_warning);
    CHECK(cub.min_gap > 1e-6);
    CHECK(cub.max_root_residual < 1e-10);

    const auto r = cubic_roots({1.0, 0.0, -4.0, 0.0});
    std::vector<double> re;
    for (auto x : r) {
        CHECK(std::abs(x.imag()) < 1e-14);
        re.push_back(x.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0));
    CHECK(std::abs(re[1]) < 1e-14);
    CHECK(re[2] == doctest::Approx(2.0));
}

TEST_CASE("singular fiber value") {
    const auto& lat = lattice();
    ECMIntegrals I{{0.0, Complex(0.7, 0.2), 0.0, Complex(0.3, -0.4)}};
    for (int j = 1; j <= 3; ++j) {
        CHECK(std::abs(cmsing_value(lat, I, j)) > 1e-3);
        CHECK(std::abs(cmsing_value(lat, I, j) - cmsing_value(lat, I, -j)) < 1e-10 * std::abs(cmsing_value(lat, I, j)));
    }
    // secant iteration on I_N zeroes the value at omega_1
    Complex x0 = I.I[3], x1 = I.I[3] + 0.1;
    auto g = [&](Complex x) {
        auto J = I;
        J.I[3] = x;
        return cmsing_value(lat, J, 1);
    };
    for (int it = 0; it < 30 && std::abs(g(x1)) > 1e-14; ++it) {
        const Complex x2 = x1 - g(x1) * (x1 - x0) / (g(x1) - g(x0));
        x0 = x1;
        x1 = x2;
    }
    CHECK(std::abs(g(x1)) < 1e-10);
}

TEST_CASE("Floquet multipliers and gluing") {
    const auto& lat = lattice();
    const Complex k{0.4, -0.7};
    for (auto dir : {FloquetDir::x, FloquetDir::y}) {
        CHECK(std::abs(floquet(lat, -k, -alpha0, dir) * floquet(lat, k, alpha0, dir) - 1.0) < 1e-10);
        for (int j = 1; j <= 3; ++j) {
            const Complex w = floquet(lat, 0.0, lat.half_period(j), dir);
            CHECK(std::abs(std::abs(w) - 1.0) < 1e-10);
            CHECK(std::min(std::abs(w - 1.0), std::abs(w + 1.0)) < 1e-10);
        }
    }
    CHECK(std::abs(floquet(lat, 0.0, lat.half_period(1), FloquetDir::x) - 1.0) < 1e-10);
    CHECK(std::abs(floquet(lat, 0.0, lat.half_period(2), FloquetDir::x) + 1.0) < 1e-10);
    CHECK_THROWS_AS(floquet(lat, k, 1.0, FloquetDir::x), SingularAlpha);

    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
    const Eigen::MatrixXcd G = Eigen::MatrixXcd::Random(3, 3);
    CHECK(gluing_ok(id, id, G));
    Eigen::MatrixXcd Wp = Eigen::MatrixXcd::Zero(2, 2), Wm = Eigen::MatrixXcd::Zero(2, 2);
    Wp(0, 0) = 2.0;
    Wp(1, 1) = 0.5;
    Wm(0, 0) = 0.5;
    Wm(1, 1) = 2.0;
    Eigen::MatrixXcd Gd = Eigen::MatrixXcd::Zero(2, 2);
    Gd(0, 0) = 1.0;
    Gd(1, 1) = 3.0;
    CHECK(gluing_ok(Wp, Wm, Gd));
    Gd(0, 1) = 1.0;
    CHECK_FALSE(gluing_ok(Wp, Wm, Gd));
}

TEST_CASE("branch exponents near alpha = 0") {
    std::mt19937 rng(46);
    for (int N : {2, 3, 4}) {
        const auto a = branch_exponents(lattice(), config(N, false, rng));
        REQUIRE(a.size() == std::size_t(N));
        CHECK(std::abs(a[0] - (1.0 - N)) < 0.05);
        for (int i = 1; i < N; ++i) CHECK(std::abs(a[i] - 1.0) < 0.05);
    }
}
