#include "nvsigma/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace nvsigma {

namespace {

constexpr double pi = std::numbers::pi;
const Complex I{0.0, 1.0};

std::string str(Complex z) {
    std::ostringstream os;
    os << z;
    return os.str();
}

} // namespace

EllipticLattice::EllipticLattice(Complex tau) : tau_(tau) {
    if (!(tau.imag() > 0.0)) throw Error("EllipticLattice: Im(tau) must be positive");
    q_ = std::exp(I * pi * tau);
    const auto t0 = theta(0.0);
    theta1p0_ = t0[1];
    eta1_ = -(pi * pi / 6.0) * t0[3] / t0[1];
    const auto th = theta(pi * tau / 2.0);
    eta2_ = eta1_ * tau + pi * th[1] / th[0];

    // Eisenstein series through Lambert sums in e^{2 pi i tau}
    const Complex qq = std::exp(2.0 * pi * I * tau);
    Complex s3 = 0.0, s5 = 0.0, qn = 1.0;
    for (int n = 1; n < 2000; ++n) {
        qn *= qq;
        const Complex lam = qn / (1.0 - qn);
        const double n3 = double(n) * n * n;
        const Complex t3 = n3 * lam, t5 = n3 * n * n * lam;
        s3 += t3;
        s5 += t5;
        if (std::abs(t5) < 1e-18 * (1.0 + std::abs(s5))) break;
    }
    const Complex E4 = 1.0 + 240.0 * s3, E6 = 1.0 - 504.0 * s5;
    g2_ = (4.0 * std::pow(pi, 4) / 3.0) * E4;
    g3_ = (8.0 * std::pow(pi, 6) / 27.0) * E6;
}

std::array<Complex, 4> EllipticLattice::theta(Complex v) const {
    std::array<Complex, 4> t{0.0, 0.0, 0.0, 0.0};
    for (int n = 0; n < 200; ++n) {
        const double k = 2.0 * n + 1.0;
        const Complex qp = std::exp(I * pi * tau_ * ((n + 0.5) * (n + 0.5)));
        const Complex c = (n % 2 ? -2.0 : 2.0) * qp;
        const Complex s = std::sin(k * v), co = std::cos(k * v);
        const std::array<Complex, 4> term{c * s, c * k * co, -c * k * k * s, -c * k * k * k * co};
        for (int i = 0; i < 4; ++i) t[i] += term[i];
        if (n > 2 && std::abs(term[3]) < 1e-18 * (std::abs(t[3]) + std::abs(t[1]) + 1e-300) &&
            std::abs(term[0]) < 1e-18 * (std::abs(t[0]) + std::abs(t[1]) + 1e-300))
            break;
    }
    return t;
}

Complex EllipticLattice::half_period(int j) const {
    switch (j) {
    case 1: return 0.5;
    case 2: return tau_ / 2.0;
    case 3: return (1.0 + tau_) / 2.0;
    default: throw Error("half-period index must be 1, 2 or 3");
    }
}

Complex EllipticLattice::half_period_eta(int j) const {
    switch (j) {
    case 1: return eta1_;
    case 2: return eta2_;
    case 3: return eta1_ + eta2_;
    default: throw Error("half-period index must be 1, 2 or 3");
    }
}

std::pair<double, double> EllipticLattice::coords(Complex z) const {
    const double b = z.imag() / tau_.imag();
    return {z.real() - b * tau_.real(), b};
}

Complex EllipticLattice::reduce(Complex z) const {
    auto [a, b] = coords(z);
    a -= std::floor(a);
    b -= std::floor(b);
    if (a >= 1.0) a = 0.0;
    if (b >= 1.0) b = 0.0;
    return a + b * tau_;
}

EllipticLattice::Reduced EllipticLattice::centered(Complex z) const {
    const auto [a, b] = coords(z);
    Reduced r;
    r.m = int(std::lround(a));
    r.n = int(std::lround(b));
    r.lambda = double(r.m) + double(r.n) * tau_;
    r.z0 = z - r.lambda;
    r.eta = 2.0 * (double(r.m) * eta1_ + double(r.n) * eta2_);
    return r;
}

double EllipticLattice::lattice_distance(Complex z) const {
    const Complex z0 = centered(z).z0;
    double d = std::abs(z0);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) d = std::min(d, std::abs(z0 - double(i) - double(j) * tau_));
    return d;
}

Complex EllipticLattice::sigma(Complex z) const {
    const Reduced r = centered(z);
    const Complex s0 =
        std::exp(eta1_ * r.z0 * r.z0) * theta(pi * r.z0)[0] / (pi * theta1p0_);
    const bool odd = (r.m + r.n + r.m * r.n) % 2 != 0;
    return (odd ? -1.0 : 1.0) * std::exp(r.eta * (r.z0 + r.lambda / 2.0)) * s0;
}

Complex EllipticLattice::zeta(Complex z) const {
    if (lattice_distance(z) < 1e-14) throw PoleAtLattice("zeta at " + str(z));
    const Reduced r = centered(z);
    const auto t = theta(pi * r.z0);
    return 2.0 * eta1_ * r.z0 + pi * t[1] / t[0] + r.eta;
}

Complex EllipticLattice::wp(Complex z) const {
    if (lattice_distance(z) < 1e-14) throw PoleAtLattice("wp at " + str(z));
    const auto t = theta(pi * centered(z).z0);
    return -2.0 * eta1_ - pi * pi * (t[2] * t[0] - t[1] * t[1]) / (t[0] * t[0]);
}

Complex EllipticLattice::wp_prime(Complex z) const {
    if (lattice_distance(z) < 1e-14) throw PoleAtLattice("wp' at " + str(z));
    const auto t = theta(pi * centered(z).z0);
    const Complex r1 = t[1] / t[0], r2 = t[2] / t[0], r3 = t[3] / t[0];
    return -pi * pi * pi * (r3 - 3.0 * r1 * r2 + 2.0 * r1 * r1 * r1);
}

Complex EllipticLattice::legendre_defect() const {
    return eta1_ * tau_ / 2.0 - eta2_ / 2.0 - I * pi / 2.0;
}

std::vector<Complex> EllipticLattice::sigma_taylor(int order) const {
    std::vector<Complex> c(std::max(order, 0) + 1, 0.0);
    if (order < 1) return c;
    const int M = order / 4 + 3, N = order / 6 + 3;
    std::vector<std::vector<double>> a(M + 2, std::vector<double>(N + 2, 0.0));
    auto A = [&](int m, int n) -> double {
        if (m < 0 || n < 0 || m >= M + 2 || n >= N + 2) return 0.0;
        return a[m][n];
    };
    for (int w = 0; w + 1 <= order; w += 2) {
        for (int n = 0; 6 * n <= w; ++n) {
            if ((w - 6 * n) % 4) continue;
            const int m = (w - 6 * n) / 4;
            if (m == 0 && n == 0) {
                a[0][0] = 1.0;
            } else {
                a[m][n] = 3.0 * (m + 1) * A(m + 1, n - 1) + (16.0 / 3.0) * (n + 1) * A(m - 2, n + 1) -
                          (1.0 / 3.0) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * A(m - 1, n);
            }
            const int k = w + 1;
            c[k] = a[m][n] * std::pow(g2_ / 2.0, m) * std::pow(2.0 * g3_, n) /
                   std::exp(std::lgamma(k + 1.0));
        }
    }
    return c;
}

Complex InstantonData::sector() const {
    Complex s = 0.0;
    for (auto x : a) s += x;
    for (auto x : b) s -= x;
    return s;
}

void InstantonData::validate(const EllipticLattice&) const {
    if (a.empty() || a.size() != b.size())
        throw InvalidInstanton("need equally many zeros and poles, at least one of each");
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(A) || A == 0.0) throw InvalidInstanton("amplitude must be finite and nonzero");
    for (auto x : a)
        if (!finite(x)) throw InvalidInstanton("non-finite zero");
    for (auto x : b)
        if (!finite(x)) throw InvalidInstanton("non-finite pole");
}

std::pair<Complex, Complex> instanton_homogeneous(const EllipticLattice& lat,
                                                  const InstantonData& d, Complex z) {
    Complex num = d.A, den = 1.0;
    for (auto x : d.a) num *= lat.sigma(z - x);
    for (auto x : d.b) den *= lat.sigma(z - x);
    return {num, den};
}

Complex instanton_v(const EllipticLattice& lat, const InstantonData& d, Complex z) {
    for (auto x : d.b)
        if (lat.lattice_distance(z - x) < 1e-14) throw PoleHit("v has a pole at " + str(z));
    const auto [num, den] = instanton_homogeneous(lat, d, z);
    return num / den;
}

Complex instanton_log_derivative(const EllipticLattice& lat, const InstantonData& d, Complex z) {
    Complex s = 0.0;
    for (auto x : d.a) s += lat.zeta(z - x);
    for (auto x : d.b) s -= lat.zeta(z - x);
    return s;
}

std::pair<Complex, Complex> monodromy(const EllipticLattice& lat, const InstantonData& d,
                                      Complex z0) {
    const Complex v0 = instanton_v(lat, d, z0);
    return {instanton_v(lat, d, z0 + 1.0) / v0, instanton_v(lat, d, z0 + lat.tau()) / v0};
}

void check_unitary_pair(Complex c, Complex d, double tol) {
    const double n = std::norm(c) + std::norm(d);
    if (std::abs(n - 1.0) > tol)
        throw NormViolation("|c|^2 + |d|^2 = " + std::to_string(n));
}

Complex fractional_linear(Complex v, Complex c, Complex d) {
    check_unitary_pair(c, d);
    return (c * v + d) / (-std::conj(d) * v + std::conj(c));
}

std::pair<Complex, Complex> fractional_linear(std::pair<Complex, Complex> v, Complex c,
                                              Complex d) {
    check_unitary_pair(c, d);
    return {c * v.first + d * v.second, -std::conj(d) * v.first + std::conj(c) * v.second};
}

} // namespace nvsigma
