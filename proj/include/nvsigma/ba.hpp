#ifndef NVSIGMA_BA_HPP
#define NVSIGMA_BA_HPP

#include <filesystem>
#include <utility>
#include <vector>

#include "nvsigma/series.hpp"
#include "nvsigma/torus.hpp"

namespace nvsigma {

NVSIGMA_DEFINE_ERROR(NotConstantRatio);
NVSIGMA_DEFINE_ERROR(OddObstruction);

/// Formal Bloch solution psi = exp(k z + l(k) zbar) * (1 + sum_s zeta_s k^{-s})
/// of (-d dbar + u) psi = 0, with doubly periodic zeta_s.
struct BlochWave {
    GridFunction u;
    int S = 0;
    std::vector<GridFunction> zetas; // zetas[s-1] is zeta_s
    std::vector<Complex> ells;       // ells[s-1] is l_s
    std::vector<double> defects;     // recursion defect of each level over max(|rhs|, |u|)

    /// zeta_s with zeta_0 = 1.
    GridFunction zeta(int s) const;
    /// 1 + sum zeta_s k^{-s}, exact through k^{-S}.
    FieldSeries series() const;
    /// l(k) = sum l_s k^{-s}.
    FormalSeries ell_series() const;
    const TorusShape& shape() const { return u.shape(); }
};

struct BlochOptions {
    /// Relative threshold for dropping Fourier modes of u and of each new
    /// zeta_s (0 keeps everything). Roundoff in high modes is otherwise
    /// amplified by one derivative per level.
    double filter = 0.0;
    double solve_tol = 1e-10;
};

BlochWave bloch_wave(const GridFunction& u, int S, const BlochOptions& opt = {});

/// zeta*_0..zeta*_S of the dual series psi* = exp(-k z - l zbar) zeta*(k)
/// fixed by [zeta* (k + d)^s zeta]_{k^0} = delta_{s0}.
FieldSeries dual_series(const BlochWave& w);

/// [zeta*(k) (k + d)^s zeta(k)]_{k^0}, which dual_series makes delta_{s0}.
GridFunction dual_residue(const FieldSeries& dual, const BlochWave& w, int s);

/// Highest order treated as converged, S - 2. Residues need two orders of
/// headroom; orders above this are carried along but not checked.
int converged_order(const BlochWave& w);

/// max_s |zeta*_s - (-1)^s zeta_s| over s = 1..max_s (default converged_order),
/// relative to max(1, max|zeta_s|).
double self_duality_defect(const BlochWave& w, int max_s = -1);

struct SelfDualizeOptions {
    double constant_tol = 1e-8;
    double odd_tol = 1e-8;
};

/// Rescales w by an even constant series so that zeta*(k) = zeta(-k).
/// Returns the new wave and h(k) = zeta(-k) / zeta*(k) of the input.
std::pair<BlochWave, FormalSeries> self_dualize(const BlochWave& w,
                                                const SelfDualizeOptions& opt = {});

/// Multiplies the periodic part by a constant series r(k) = 1 + sum r_s k^{-s}.
BlochWave rescale(const BlochWave& w, const FormalSeries& r);

/// [zeta(-k) (k + d)^{2n+1} zeta(k)]_{k^0}, i.e. minus the odd residue.
GridFunction odd_residue(const BlochWave& w, int n);

/// max_s |l_{2s}| over retained even orders.
double ell_parity_defect(const BlochWave& w);

enum class Axis { x, y };

/// log of the Floquet multiplier: k + l(k) along x, tau k + conj(tau) l(k) along y.
FormalSeries multiplier_exponents(const BlochWave& w, Axis dir);

/// Writes <stem>.json (manifest {S, ells, u, zetas}) and one CSV per field
/// next to it. Returns the manifest path.
std::filesystem::path write_bloch(const BlochWave& w, const std::filesystem::path& stem);
BlochWave read_bloch(const std::filesystem::path& manifest);

} // namespace nvsigma

#endif // NVSIGMA_BA_HPP
