#ifndef NVSIGMA_ECM_HPP
#define NVSIGMA_ECM_HPP

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "nvsigma/elliptic.hpp"

namespace nvsigma {

NVSIGMA_DEFINE_ERROR(SingularAlpha);
NVSIGMA_DEFINE_ERROR(IllConditioned);
NVSIGMA_DEFINE_ERROR(ConstraintsNotMet);

/// N particles at z_i with momenta rho_i; coupling fixed to 1.
struct ECMConfig {
    std::vector<Complex> z;
    std::vector<Complex> rho;
    int N() const { return int(z.size()); }
    void validate(const EllipticLattice& lat) const;
};

/// Integrals I_1..I_N; H(p) = p^N + I_1 p^{N-1} + ... + I_N.
struct ECMIntegrals {
    std::vector<Complex> I;
    int N() const { return int(I.size()); }
    /// I_l with I_0 = 1 and zero outside 0..N.
    Complex at(int l) const;
};

Eigen::MatrixXcd lax(const EllipticLattice& lat, const ECMConfig& c, Complex alpha);

/// det(k - L(alpha)).
Complex charpoly_direct(const EllipticLattice& lat, const ECMConfig& c, Complex k, Complex alpha);

/// det(k - L(-alpha)). This is the polynomial the sigma form represents for
/// every N; it agrees with charpoly_direct for N <= 2 and at turning points.
Complex charpoly_reflected(const EllipticLattice& lat, const ECMConfig& c, Complex k, Complex alpha);

/// s_n(alpha) = sigma^{(n)}(alpha) / (n! sigma(alpha)) for n = 0..nmax, from the
/// Taylor expansion of log sigma(alpha + t) through the wp differential equation.
std::vector<Complex> sigma_derivative_ratios(const EllipticLattice& lat, Complex alpha, int nmax);

/// f(p, alpha) = sum_n s_n(alpha) H^{(n)}(p).
Complex spectral_f(const EllipticLattice& lat, const ECMIntegrals& I, Complex p, Complex alpha);
/// F = sigma(alpha) f(p, alpha), entire in alpha.
Complex spectral_F(const EllipticLattice& lat, const ECMIntegrals& I, Complex p, Complex alpha);

/// R(k, alpha) = f(k + sign zeta(alpha), alpha).
Complex charpoly_sigma(const EllipticLattice& lat, const ECMIntegrals& I, Complex k,
                       Complex alpha, int sign = -1);

struct FitResult {
    ECMIntegrals I;
    double residual = 0.0;  // max |sampled - sigma form| over samples, relative
    double condition = 0.0; // of the sample matrix
};

/// Least-squares fit of I from 4N + 4 sample pairs (k, alpha) of charpoly_reflected.
FitResult fit_integrals(const EllipticLattice& lat, const ECMConfig& c, int sign = -1);
/// Same, with a caller-supplied sampler of the characteristic polynomial.
template <class Fn>
FitResult fit_integrals_from(const EllipticLattice& lat, int N, Fn&& sample, int sign = -1);

/// max over fixed samples of |F(-p,-alpha) - (-1)^{N+1} F(p,alpha)| / max(1, |F|).
double involution_residual(const EllipticLattice& lat, const ECMIntegrals& I);

/// T(i, j) = d_alpha^i d_p^j F(0, 0) for i + j <= max_total (other entries 0).
Eigen::MatrixXcd turning_table(const EllipticLattice& lat, const ECMIntegrals& I, int max_total);
/// Table for the n-th set of turning-point constraints, i + j <= 2n.
Eigen::MatrixXcd turning_constraints(const EllipticLattice& lat, const ECMIntegrals& I, int n);
/// Largest |T(i, j)| with i + j <= 2n.
double turning_defect(const EllipticLattice& lat, const ECMIntegrals& I, int n);

struct BranchCubic {
    std::array<Complex, 4> b; // F = b1 p^3 + b2 p^2 a + b3 p a^2 + b4 a^3 + ...
    std::vector<Complex> roots;
    double min_gap = 0.0;
    bool distinct_warning = false; // min gap below 1e-6
    double max_root_residual = 0.0;
};
BranchCubic branch_cubic(const EllipticLattice& lat, const ECMIntegrals& I, double tol = 1e-8);
/// Roots of b1 g^3 + b2 g^2 + b3 g + b4 by companion-matrix eigenvalues.
std::vector<Complex> cubic_roots(const std::array<Complex, 4>& b);

/// R(0, omega_j) = f(sign zeta(omega_j), omega_j), j = 1..3; pass a negative
/// j for -omega_j.
Complex cmsing_value(const EllipticLattice& lat, const ECMIntegrals& I, int j, int sign = -1);

enum class FloquetDir { x, y };
/// w_x = exp(k - zeta(alpha) + 2 eta1 alpha), w_y = exp(tau (k - zeta(alpha)) + 2 eta2 alpha).
Complex floquet(const EllipticLattice& lat, Complex k, Complex alpha, FloquetDir dir);

/// G == W+ G W- entrywise, W+- diagonal.
bool gluing_ok(const Eigen::MatrixXcd& Wplus, const Eigen::MatrixXcd& Wminus,
               const Eigen::MatrixXcd& G, double tol = 1e-10);

/// a_i from k alpha = -a + h alpha along alpha = t e^{i theta}, t in [t_min, t_max],
/// using the eigenvalues of L(alpha). Sorted ascending by real part.
std::vector<double> branch_exponents(const EllipticLattice& lat, const ECMConfig& c,
                                     double t_min = 1e-3, double t_max = 1e-2,
                                     double theta = 0.7);

// --- implementation of the template ---

std::vector<Complex> basis_values(const EllipticLattice& lat, int N, Complex k, Complex alpha,
                                  int sign);
FitResult solve_fit(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& rhs, int N);
std::vector<std::pair<Complex, Complex>> fit_samples(const EllipticLattice& lat, int N);

template <class Fn>
FitResult fit_integrals_from(const EllipticLattice& lat, int N, Fn&& sample, int sign) {
    const auto pts = fit_samples(lat, N);
    Eigen::MatrixXcd A(pts.size(), N);
    Eigen::VectorXcd rhs(pts.size());
    for (std::size_t s = 0; s < pts.size(); ++s) {
        const auto phi = basis_values(lat, N, pts[s].first, pts[s].second, sign);
        for (int l = 1; l <= N; ++l) A(s, l - 1) = phi[l];
        rhs(s) = sample(pts[s].first, pts[s].second) - phi[0];
    }
    return solve_fit(A, rhs, N);
}

} // namespace nvsigma

#endif // NVSIGMA_ECM_HPP
