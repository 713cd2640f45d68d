#ifndef NVSIGMA_NV_HPP
#define NVSIGMA_NV_HPP

#include <vector>

#include "nvsigma/ba.hpp"
#include "nvsigma/pdo.hpp"

namespace nvsigma {

NVSIGMA_DEFINE_ERROR(DepthExceedsSeries);
NVSIGMA_DEFINE_ERROR(F0Violation);

/// L = Phi d Phi^{-1} with Phi = 1 + sum zeta_s d^{-s}. Built one order
/// deeper than D internally, so every retained order of L is exact. Needs D <= S-1.
PseudoDiffOp dress(const BlochWave& w, int D);

/// Applies L to the formal wave: returns the periodic part of L psi as a
/// series, exact down to k^{-D}.
FieldSeries apply_to_wave(const PseudoDiffOp& L, const FieldSeries& zeta);

/// max over powers of |[(L - k) psi]_p| relative to max(1, max|zeta_s|).
double eigen_defect(const PseudoDiffOp& L, const BlochWave& w);

struct BkpResidual {
    double absolute = 0.0; // max_i |(L* + d L d^{-1})_i|
    double relative = 0.0; // divided by max_i |L_i| over the same orders
};
/// Residual of L* = -d L d^{-1} over orders 1 .. -D.
BkpResidual bkp_residual(const PseudoDiffOp& L);

struct FlowRhs {
    GridFunction dtu; // dbar F1
    GridFunction F1;  // res L^{2n+1}
    GridFunction F0;  // res L^{2n+1} d^{-1}
    double f0_relative = 0.0;
};

/// Right-hand side of the n-th flow. Needs 2n+1 <= D. Throws F0Violation when
/// |F0| > f0_tol * |L^{2n+1}|.
FlowRhs flow_rhs(const BlochWave& w, int n, int D, double f0_tol = 1e-7);
FlowRhs flow_rhs(const PseudoDiffOp& L, int n, double f0_tol = 1e-7);

struct FlowOptions {
    int S = 8;
    int D = 6;
    BlochOptions bloch;
    /// Relative Fourier filter applied to each stage value (0 disables).
    double filter = 0.0;
    /// Galerkin band limit on the velocity, max(|m|, |n|) <= max_wavenumber
    /// (0 disables). Explicit RK4 is only stable while dt |d|^{2n+1} stays
    /// below about 2.8 on every retained mode.
    int max_wavenumber = 0;
};

/// du/dt_n = dbar res L^{2n+1} from the self-dualized Bloch wave of u.
GridFunction flow_velocity(const GridFunction& u, int n, const FlowOptions& opt = {});
/// One classical RK4 step.
GridFunction flow_step(const GridFunction& u, int n, double dt, const FlowOptions& opt = {});

struct CurrentReport {
    FieldSeries jz, jzbar;
    std::vector<GridFunction> J;        // J_n = [j_z]_{k^{-2n-1}} / 2
    std::vector<double> j_vs_f1;        // max|J_n - F1_{2n+1}| / max(1, max|F1|)
    double conservation = 0.0;          // max over powers of |dbar j_z + d j_zbar|, relative
    double even_parity = 0.0;           // max |even-power coefficient of j_z - 2k|, relative
    std::vector<double> mean_J;         // |torus_mean(J_n)|
    bool pass(double tol_pointwise, double tol_mean) const;
};

/// Current j_z = psi^s d psi - psi d psi^s and its mate for a self-dual wave.
/// Compares J_n with res L^{2n+1} for n = 0..nmax (nmax < 0 picks the largest
/// exact one).
CurrentReport current_check(const BlochWave& w, int D, int nmax = -1);

/// (L_+^{2n+1})^* + d L_+^{2n+1} d^{-1}, relative max over retained orders.
double plus_part_adjoint_defect(const PseudoDiffOp& L, int n);

} // namespace nvsigma

#endif // NVSIGMA_NV_HPP
