#include "nvsigma/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nvsigma {

namespace {

const Complex I_{0.0, 1.0};

double falling(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= double(n - i);
    return r;
}

double factorial(int n) { return falling(n, n); }

void check_alpha(const EllipticLattice& lat, const ECMConfig& c, Complex alpha) {
    if (lat.lattice_distance(alpha) < 1e-12) throw SingularAlpha("alpha on the lattice");
    for (int i = 0; i < c.N(); ++i)
        for (int j = 0; j < c.N(); ++j)
            if (i != j && lat.lattice_distance(alpha + c.z[i] - c.z[j]) < 1e-12)
                throw SingularAlpha("alpha + z_i - z_j on the lattice");
}

} // namespace

void ECMConfig::validate(const EllipticLattice& lat) const {
    if (z.empty()) throw Error("eCM configuration needs N >= 1");
    if (z.size() != rho.size()) throw Error("positions and momenta differ in length");
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (lat.lattice_distance(z[i] - z[j]) < 1e-10)
                throw Error("particles " + std::to_string(i) + " and " + std::to_string(j) +
                            " coincide on the curve");
}

Complex ECMIntegrals::at(int l) const {
    if (l == 0) return 1.0;
    if (l < 0 || l > N()) return 0.0;
    return I[l - 1];
}

Eigen::MatrixXcd lax(const EllipticLattice& lat, const ECMConfig& c, Complex alpha) {
    c.validate(lat);
    check_alpha(lat, c, alpha);
    const int N = c.N();
    Eigen::MatrixXcd L(N, N);
    const Complex sa = lat.sigma(alpha);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) {
                L(i, j) = c.rho[i];
            } else {
                const Complex zij = c.z[i] - c.z[j];
                L(i, j) = lat.sigma(alpha + zij) / (lat.sigma(zij) * sa);
            }
        }
    return L;
}

Complex charpoly_direct(const EllipticLattice& lat, const ECMConfig& c, Complex k, Complex alpha) {
    const Eigen::MatrixXcd L = lax(lat, c, alpha);
    const Eigen::MatrixXcd M = k * Eigen::MatrixXcd::Identity(c.N(), c.N()) - L;
    return M.partialPivLu().determinant();
}

Complex charpoly_reflected(const EllipticLattice& lat, const ECMConfig& c, Complex k, Complex alpha) {
    return charpoly_direct(lat, c, k, -alpha);
}

std::vector<Complex> sigma_derivative_ratios(const EllipticLattice& lat, Complex alpha, int nmax) {
    if (lat.lattice_distance(alpha) < 1e-12) throw SingularAlpha("alpha on the lattice");
    // Taylor coefficients of wp(alpha + t) from wp'' = 6 wp^2 - g2/2
    std::vector<Complex> p(nmax + 2, 0.0);
    p[0] = lat.wp(alpha);
    if (nmax + 2 > 1) p[1] = lat.wp_prime(alpha);
    for (int j = 0; j + 2 < int(p.size()); ++j) {
        Complex s = 0.0;
        for (int a = 0; a <= j; ++a) s += p[a] * p[j - a];
        s *= 6.0;
        if (j == 0) s -= lat.g2() / 2.0;
        p[j + 2] = s / double((j + 2) * (j + 1));
    }
    // log sigma(alpha + t) - log sigma(alpha) = zeta t - sum_j p_j t^{j+2} / ((j+1)(j+2))
    std::vector<Complex> L(nmax + 1, 0.0);
    if (nmax >= 1) L[1] = lat.zeta(alpha);
    for (int j = 0; j + 2 <= nmax; ++j) L[j + 2] = -p[j] / double((j + 1) * (j + 2));
    std::vector<Complex> E(nmax + 1, 0.0);
    E[0] = 1.0;
    for (int n = 1; n <= nmax; ++n) {
        Complex s = 0.0;
        for (int k = 1; k <= n; ++k) s += double(k) * L[k] * E[n - k];
        E[n] = s / double(n);
    }
    return E;
}

std::vector<Complex> basis_values(const EllipticLattice& lat, int N, Complex k, Complex alpha,
                                  int sign) {
    const Complex p = k + double(sign) * lat.zeta(alpha);
    const auto s = sigma_derivative_ratios(lat, alpha, N);
    std::vector<Complex> phi(N + 1, 0.0);
    for (int l = 0; l <= N; ++l) {
        const int deg = N - l;
        for (int n = 0; n <= deg; ++n) phi[l] += s[n] * falling(deg, n) * std::pow(p, deg - n);
    }
    return phi;
}

Complex spectral_f(const EllipticLattice& lat, const ECMIntegrals& I, Complex p, Complex alpha) {
    const int N = I.N();
    const auto s = sigma_derivative_ratios(lat, alpha, N);
    Complex f = 0.0;
    for (int n = 0; n <= N; ++n) {
        // H^{(n)}(p) = sum_l I_l (N-l)!/(N-l-n)! p^{N-l-n}
        Complex h = 0.0;
        for (int l = 0; l <= N - n; ++l) h += I.at(l) * falling(N - l, n) * std::pow(p, N - l - n);
        f += s[n] * h;
    }
    return f;
}

Complex spectral_F(const EllipticLattice& lat, const ECMIntegrals& I, Complex p, Complex alpha) {
    return lat.sigma(alpha) * spectral_f(lat, I, p, alpha);
}

Complex charpoly_sigma(const EllipticLattice& lat, const ECMIntegrals& I, Complex k, Complex alpha,
                       int sign) {
    return spectral_f(lat, I, k + double(sign) * lat.zeta(alpha), alpha);
}

std::vector<std::pair<Complex, Complex>> fit_samples(const EllipticLattice& lat, int N) {
    const int K = 4 * N + 4;
    std::vector<std::pair<Complex, Complex>> pts;
    for (int s = 0; s < K; ++s) {
        const double t = double(s) / K;
        const Complex k = (0.6 + 0.5 * t) * std::exp(I_ * (2.0 * std::numbers::pi * t + 0.3));
        const Complex alpha = (0.137 + 0.61 * t) + (0.171 + 0.29 * std::sin(7.0 * t)) * lat.tau();
        pts.emplace_back(k, alpha);
    }
    return pts;
}

FitResult solve_fit(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& rhs, int N) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    FitResult r;
    r.condition = sv(0) / sv(sv.size() - 1);
    if (!(r.condition <= 1e10))
        throw IllConditioned("sample matrix condition " + std::to_string(r.condition));
    const Eigen::VectorXcd x = svd.solve(rhs);
    r.I.I.assign(x.data(), x.data() + N);
    r.residual = (A * x - rhs).cwiseAbs().maxCoeff() / std::max(1.0, rhs.cwiseAbs().maxCoeff());
    return r;
}

FitResult fit_integrals(const EllipticLattice& lat, const ECMConfig& c, int sign) {
    c.validate(lat);
    return fit_integrals_from(
        lat, c.N(), [&](Complex k, Complex a) { return charpoly_reflected(lat, c, k, a); }, sign);
}

double involution_residual(const EllipticLattice& lat, const ECMIntegrals& I) {
    const double parity = (I.N() % 2) ? 1.0 : -1.0; // (-1)^{N+1}
    double worst = 0.0;
    for (int s = 0; s < 12; ++s) {
        const double t = s / 12.0;
        const Complex p = 0.8 * std::exp(I_ * (2.0 * std::numbers::pi * t)) + 0.1;
        const Complex alpha = (0.11 + 0.5 * t) + (0.23 + 0.4 * t * t) * lat.tau();
        const Complex F = spectral_F(lat, I, p, alpha);
        const Complex Fm = spectral_F(lat, I, -p, -alpha);
        worst = std::max(worst, std::abs(Fm - parity * F) / std::max(1.0, std::abs(F)));
    }
    return worst;
}

Eigen::MatrixXcd turning_table(const EllipticLattice& lat, const ECMIntegrals& I, int max_total) {
    const int N = I.N();
    const auto c = lat.sigma_taylor(max_total + N + 1);
    auto sig = [&](int m) { return m < int(c.size()) ? c[m] * factorial(m) : Complex{}; };
    auto H = [&](int m) { return m > N ? Complex{} : I.at(N - m) * factorial(m); };
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(max_total + 1, max_total + 1);
    for (int i = 0; i <= max_total; ++i)
        for (int j = 0; i + j <= max_total; ++j) {
            Complex s = 0.0;
            for (int n = 0; n <= N; ++n) s += sig(n + i) * H(n + j) / factorial(n);
            T(i, j) = s;
        }
    return T;
}

Eigen::MatrixXcd turning_constraints(const EllipticLattice& lat, const ECMIntegrals& I, int n) {
    return turning_table(lat, I, 2 * n);
}

double turning_defect(const EllipticLattice& lat, const ECMIntegrals& I, int n) {
    return turning_constraints(lat, I, n).cwiseAbs().maxCoeff();
}

std::vector<Complex> cubic_roots(const std::array<Complex, 4>& b) {
    if (std::abs(b[0]) == 0.0) throw Error("cubic has vanishing leading coefficient");
    Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
    C(1, 0) = 1.0;
    C(2, 1) = 1.0;
    C(0, 2) = -b[3] / b[0];
    C(1, 2) = -b[2] / b[0];
    C(2, 2) = -b[1] / b[0];
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C, false);
    std::vector<Complex> r(es.eigenvalues().data(), es.eigenvalues().data() + 3);
    std::sort(r.begin(), r.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return r;
}

BranchCubic branch_cubic(const EllipticLattice& lat, const ECMIntegrals& I, double tol) {
    const double defect = turning_defect(lat, I, 1);
    if (defect > tol)
        throw ConstraintsNotMet("turning constraints violated by " + std::to_string(defect));
    const Eigen::MatrixXcd T = turning_table(lat, I, 3);
    BranchCubic bc;
    bc.b = {T(0, 3) / 6.0, T(1, 2) / 2.0, T(2, 1) / 2.0, T(3, 0) / 6.0};
    bc.roots = cubic_roots(bc.b);
    bc.min_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        for (int c = a + 1; c < 3; ++c) bc.min_gap = std::min(bc.min_gap, std::abs(bc.roots[a] - bc.roots[c]));
        const Complex g = bc.roots[a];
        const Complex val = ((bc.b[0] * g + bc.b[1]) * g + bc.b[2]) * g + bc.b[3];
        const double scale = std::abs(bc.b[0]) * std::pow(std::abs(g), 3) +
                             std::abs(bc.b[1]) * std::norm(g) + std::abs(bc.b[2]) * std::abs(g) +
                             std::abs(bc.b[3]);
        bc.max_root_residual = std::max(bc.max_root_residual, std::abs(val) / std::max(scale, 1e-300));
    }
    bc.distinct_warning = bc.min_gap < 1e-6;
    return bc;
}

Complex cmsing_value(const EllipticLattice& lat, const ECMIntegrals& I, int j, int sign) {
    const Complex omega = (j < 0 ? -1.0 : 1.0) * lat.half_period(std::abs(j));
    return spectral_f(lat, I, double(sign) * lat.zeta(omega), omega);
}

Complex floquet(const EllipticLattice& lat, Complex k, Complex alpha, FloquetDir dir) {
    if (lat.lattice_distance(alpha) < 1e-12) throw SingularAlpha("alpha on the lattice");
    const Complex z = lat.zeta(alpha);
    if (dir == FloquetDir::x) return std::exp(k - z + 2.0 * lat.eta1() * alpha);
    return std::exp(lat.tau() * (k - z) + 2.0 * lat.eta2() * alpha);
}

bool gluing_ok(const Eigen::MatrixXcd& Wplus, const Eigen::MatrixXcd& Wminus,
               const Eigen::MatrixXcd& G, double tol) {
    const Eigen::MatrixXcd r = Wplus * G * Wminus - G;
    return r.cwiseAbs().maxCoeff() <= tol * std::max(1.0, G.cwiseAbs().maxCoeff());
}

std::vector<double> branch_exponents(const EllipticLattice& lat, const ECMConfig& c,
                                     double t_min, double t_max, double theta) {
    const int N = c.N(), K = 7;
    Eigen::MatrixXcd A(K, 2);
    Eigen::MatrixXcd Y(K, N);
    for (int s = 0; s < K; ++s) {
        const double t = t_min * std::pow(t_max / t_min, double(s) / (K - 1));
        const Complex alpha = t * std::exp(I_ * theta);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(lax(lat, c, alpha), false);
        std::vector<Complex> ka(N);
        for (int i = 0; i < N; ++i) ka[i] = es.eigenvalues()(i) * alpha;
        std::sort(ka.begin(), ka.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
        A(s, 0) = 1.0;
        A(s, 1) = alpha;
        for (int i = 0; i < N; ++i) Y(s, i) = ka[i];
    }
    const Eigen::MatrixXcd coef = A.colPivHouseholderQr().solve(Y);
    std::vector<double> a(N);
    for (int i = 0; i < N; ++i) a[i] = -coef(0, i).real();
    std::sort(a.begin(), a.end());
    return a;
}

} // namespace nvsigma
