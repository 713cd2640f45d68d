#ifndef NVSIGMA_HARMONIC_HPP
#define NVSIGMA_HARMONIC_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "nvsigma/ba.hpp"
#include "nvsigma/elliptic.hpp"
#include "nvsigma/torus.hpp"

namespace nvsigma {

NVSIGMA_DEFINE_ERROR(FGViolation);
NVSIGMA_DEFINE_ERROR(DegenerateDenominator);

/// Map from the torus to the complexified sphere (q, q) = 1, with the
/// bilinear pairing sum a^i b^i (no conjugation).
struct SphereMap {
    std::vector<GridFunction> q;
    bool is_real = false;

    int N() const { return int(q.size()); }
    const TorusShape& shape() const { return q.at(0).shape(); }
    /// max |(q, q) - 1|
    double norm_defect() const;
    /// max |Im q^i|
    double imag_defect() const;
};

/// Bilinear pairing sum_i a^i b^i.
GridFunction pair(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b);

/// q^1 + i q^2 = 2v/(1+|v|^2), q^3 = (1-|v|^2)/(1+|v|^2). Samples with
/// |v| above overflow_guard are treated as v = infinity, q = (0, 0, -1).
SphereMap stereographic(const GridFunction& v, double overflow_guard = 1e150);
/// Same from homogeneous coordinates v = num/den; regular at zeros and poles.
SphereMap stereographic(const GridFunction& num, const GridFunction& den);

/// Stereographic image of v(z) = A prod sigma(z-a_i)/sigma(z-b_i) on the grid,
/// optionally followed by the unitary fractional-linear map (c, d).
SphereMap instanton_map(const EllipticLattice& lat, const InstantonData& d,
                        const TorusShape& shape,
                        std::optional<std::pair<Complex, Complex>> cd = std::nullopt);

/// -2 |v'|^2 / (1 + |v|^2)^2 evaluated from the elliptic formulas (no grid calculus).
GridFunction instanton_potential_exact(const EllipticLattice& lat, const InstantonData& d,
                                       const TorusShape& shape);

/// u = -(d q, dbar q).
GridFunction potential(const SphereMap& m);

/// max_i |(-d dbar + u) q^i| / max(1, max|q^i|).
double schrodinger_residual(const SphereMap& m, const GridFunction& u);

/// T_i = (q, d^i q) for i = 0..M.
using MomentTable = std::vector<GridFunction>;
MomentTable moments(const SphereMap& m, int M);
/// max|T_i| / max(1, max|d^i q|) for i = 0..M.
std::vector<double> relative_moments(const SphereMap& m, int M);

/// f_i = -[zeta(-k) (k + d)^i zeta(k)]_{k^{2m}} for i = 0..M.
MomentTable fermi_moments(const BlochWave& w, int m, int M);

/// Defect of the moment identity expressing dbar T_i through T_0..T_{i-1}
/// and u, divided by the largest term. Needs i >= 2 (documented range i >= 3).
double moment_recursion_residual(const MomentTable& T, const GridFunction& u, int i);

struct WmOrder {
    int m = 1;
    bool infinite = false; // every tested order vanished
    std::vector<double> values; // max|(d^j q, d^j q)| / max(1, max|d^j q|^2), j = 1..maxj
};
WmOrder wm_order(const SphereMap& m, int maxj, double tol = 1e-7);

/// max|(q, L_+^{2n+1} q)| relative to max(1, max|L_+^{2n+1} q|).
double constraint_pairing(const SphereMap& m, const BlochWave& w, int n, int D);

/// |D V| / (largest of its four terms), D the linearization of the sigma model.
double linearized_residual(const SphereMap& m, const std::vector<GridFunction>& V);

/// (1/4pi) int q . (q_x x q_y) dx dy.
double instanton_charge(const SphereMap& m);

struct O3Report {
    double fg1 = 0.0;             // |r1^2 f1^2 + r2^2 f2^2 - 1|, relative
    double fg2 = 0.0;             // |r1^2 g1^2 + r2^2 g2^2 + r3^2|, relative
    double fg3 = 0.0;             // |r1^2 f1 g1 + r2^2 f2 g2|, relative
    double c_discrepancy = 0.0;   // between the two expressions for c
    double c_imag = 0.0;          // |Im c|
    double unit_norm = 0.0;       // |(y, y) - 1|
    double reality = 0.0;         // max |Im y_j|
    double v_identity = 0.0;      // v = (y1 + i y2)/(1 + y3) = r1 f1 + i r2 f2
    double v_inverse = 0.0;       // 1/v = r1 f1 - i r2 f2
    int masked = 0;               // points where the first c expression is undefined
    SphereMap y;
    double worst() const;
};

/// Closes the chain f -> g -> c -> psi -> y for the real case (G = 1).
O3Report o3_reconstruct(const GridFunction& f1, const GridFunction& f2, Complex r1, Complex r2,
                        Complex r3);

/// f1 = (v + 1/v)/(2 r1), f2 = (v - 1/v)/(2 i r2) from homogeneous samples of v.
std::pair<GridFunction, GridFunction> f_from_v(const GridFunction& num, const GridFunction& den,
                                               Complex r1, Complex r2);

std::filesystem::path write_map(const SphereMap& m, const std::filesystem::path& stem);
SphereMap read_map(const std::filesystem::path& manifest);

} // namespace nvsigma

#endif // NVSIGMA_HARMONIC_HPP
