#ifndef NVSIGMA_ELLIPTIC_HPP
#define NVSIGMA_ELLIPTIC_HPP

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "nvsigma/error.hpp"

namespace nvsigma {

using Complex = std::complex<double>;

NVSIGMA_DEFINE_ERROR(PoleAtLattice);
NVSIGMA_DEFINE_ERROR(PoleHit);
NVSIGMA_DEFINE_ERROR(NormViolation);
NVSIGMA_DEFINE_ERROR(InvalidInstanton);

/// Weierstrass functions for the lattice Z + tau Z, evaluated through the
/// first Jacobi theta function on a reduced argument.
class EllipticLattice {
public:
    explicit EllipticLattice(Complex tau);

    Complex tau() const { return tau_; }
    Complex eta1() const { return eta1_; } // zeta(1/2)
    Complex eta2() const { return eta2_; } // zeta(tau/2)
    Complex g2() const { return g2_; }
    Complex g3() const { return g3_; }

    /// omega_1 = 1/2, omega_2 = tau/2, omega_3 = (1+tau)/2.
    Complex half_period(int j) const;
    /// zeta(omega_j); the j = 3 value is eta1 + eta2.
    Complex half_period_eta(int j) const;

    Complex sigma(Complex z) const;
    Complex zeta(Complex z) const;
    Complex wp(Complex z) const;
    Complex wp_prime(Complex z) const;

    /// eta1 tau/2 - eta2/2 - pi i/2; zero for a consistent lattice.
    Complex legendre_defect() const;

    /// Lattice coordinates (a, b) with z = a + b tau.
    std::pair<double, double> coords(Complex z) const;
    /// Representative in the half-open cell a, b in [0, 1).
    Complex reduce(Complex z) const;
    /// Distance from z to the nearest lattice point.
    double lattice_distance(Complex z) const;

    /// Taylor coefficients c_0..c_order of sigma at 0 from the classical
    /// recursion in g2, g3.
    std::vector<Complex> sigma_taylor(int order) const;

private:
    struct Reduced {
        Complex z0;     // z - lambda, lambda = m + n tau
        Complex lambda; // lattice shift
        Complex eta;    // eta_lambda = 2 (m eta1 + n eta2)
        int m = 0, n = 0;
    };
    Reduced centered(Complex z) const;
    // theta_1(v) and its first three v-derivatives
    std::array<Complex, 4> theta(Complex v) const;

    Complex tau_;
    Complex q_;
    Complex theta1p0_;
    Complex eta1_, eta2_, g2_, g3_;
};

/// v(z) = A prod sigma(z - a_i) / sigma(z - b_i).
struct InstantonData {
    Complex A{1.0, 0.0};
    std::vector<Complex> a; // zeros
    std::vector<Complex> b; // poles
    /// Sum (a_i - b_i): zero for the periodic sector.
    Complex sector() const;
    void validate(const EllipticLattice& lat) const;
};

/// (numerator, denominator) of v at z; well defined at zeros and poles.
std::pair<Complex, Complex> instanton_homogeneous(const EllipticLattice& lat,
                                                  const InstantonData& d, Complex z);
Complex instanton_v(const EllipticLattice& lat, const InstantonData& d, Complex z);
/// v'/v = sum zeta(z - a_i) - zeta(z - b_i).
Complex instanton_log_derivative(const EllipticLattice& lat, const InstantonData& d, Complex z);
/// (v(z0+1)/v(z0), v(z0+tau)/v(z0)).
std::pair<Complex, Complex> monodromy(const EllipticLattice& lat, const InstantonData& d,
                                      Complex z0 = {0.1234, 0.0567});

/// (c v + d) / (-conj(d) v + conj(c)), for |c|^2 + |d|^2 = 1.
Complex fractional_linear(Complex v, Complex c, Complex d);
/// The same action on homogeneous coordinates (num, den).
std::pair<Complex, Complex> fractional_linear(std::pair<Complex, Complex> v, Complex c,
                                              Complex d);
void check_unitary_pair(Complex c, Complex d, double tol = 1e-12);

} // namespace nvsigma

#endif // NVSIGMA_ELLIPTIC_HPP
