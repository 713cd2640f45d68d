#include "nvsigma/nv.hpp"

#include <string>

namespace nvsigma {

namespace {

// 1 + sum_{s=1}^{depth} zeta_s d^{-s}
PseudoDiffOp wave_operator(const BlochWave& w, int depth) {
    PseudoDiffOp phi = PseudoDiffOp::identity(w.shape(), depth);
    for (int s = 1; s <= depth; ++s) phi.at(-s) = w.zeta(s);
    return phi;
}

FieldSeries times_k(const FieldSeries& s, Complex c = 1.0) {
    FieldSeries out(s.top() + 1, s.bottom() + 1, s.zero());
    for (int p = s.top(); p >= s.bottom(); --p) out[p + 1] = c * s[p];
    return out;
}

double max_rel(const PseudoDiffOp& a, double scale) {
    return a.norm() / std::max(1.0, scale);
}

} // namespace

PseudoDiffOp dress(const BlochWave& w, int D) {
    if (D < 1 || D > w.S - 1)
        throw DepthExceedsSeries("depth " + std::to_string(D) + " needs S >= " +
                                 std::to_string(D + 1) + ", have S = " + std::to_string(w.S));
    // Phi d needs zeta_{D+1} at order -D, so work one order deeper.
    const int deep = D + 1;
    const PseudoDiffOp phi = wave_operator(w, deep);
    const PseudoDiffOp L =
        compose(compose(phi, PseudoDiffOp::d(w.shape(), deep, 1)), invert_monic(phi));
    return L.truncated(D);
}

FieldSeries apply_to_wave(const PseudoDiffOp& L, const FieldSeries& zeta) {
    FieldSeries out(L.max_order() + zeta.top(), L.max_order() + zeta.bottom(), zeta.zero());
    for (int i = L.max_order(); i >= L.min_order(); --i) {
        if (L.is_zero(i)) continue;
        out = out + shifted_power(zeta, i).scaled(L.at(i));
    }
    // the dropped orders below -D would contribute from k^{-D-1} down
    return out.truncated(L.min_order());
}

double eigen_defect(const PseudoDiffOp& L, const BlochWave& w) {
    const FieldSeries z = w.series();
    const FieldSeries defect = apply_to_wave(L, z) - times_k(z);
    double scale = 1.0;
    for (const auto& f : w.zetas) scale = std::max(scale, f.max_abs());
    return max_abs(defect, defect.bottom()) / scale;
}

BkpResidual bkp_residual(const PseudoDiffOp& L) {
    const auto& shape = L.shape();
    const int D = L.depth();
    const PseudoDiffOp r =
        adjoint(L) + compose(compose(PseudoDiffOp::d(shape, D, 1), L), PseudoDiffOp::d(shape, D, -1));
    BkpResidual out;
    out.absolute = r.norm();
    out.relative = max_rel(r, L.norm());
    return out;
}

FlowRhs flow_rhs(const PseudoDiffOp& L, int n, double f0_tol) {
    if (n < 0 || 2 * n + 1 > L.depth())
        throw DepthExceedsSeries("flow " + std::to_string(n) + " needs depth >= " +
                                 std::to_string(2 * n + 1));
    const PseudoDiffOp P = power(L, 2 * n + 1);
    FlowRhs out;
    out.F1 = res_partial(P);
    out.F0 = P.coeff(0);
    out.dtu = torus::complex_derivative(out.F1, torus::Dir::zbar);
    // orders below -(D - 2n) of P are not exact
    out.f0_relative = out.F0.max_abs() / std::max(1.0, P.norm(-(L.depth() - 2 * n)));
    if (out.f0_relative > f0_tol)
        throw F0Violation("|F0| / |L^" + std::to_string(2 * n + 1) +
                          "| = " + std::to_string(out.f0_relative));
    return out;
}

FlowRhs flow_rhs(const BlochWave& w, int n, int D, double f0_tol) {
    return flow_rhs(dress(w, D), n, f0_tol);
}

GridFunction flow_velocity(const GridFunction& u, int n, const FlowOptions& opt) {
    const BlochWave w = self_dualize(bloch_wave(u, opt.S, opt.bloch)).first;
    GridFunction v = flow_rhs(w, n, opt.D).dtu;
    if (opt.filter > 0) v = torus::chop(v, opt.filter);
    if (opt.max_wavenumber > 0) v = torus::band_limit(v, opt.max_wavenumber);
    return v;
}

GridFunction flow_step(const GridFunction& u, int n, double dt, const FlowOptions& opt) {
    const GridFunction k1 = flow_velocity(u, n, opt);
    const GridFunction k2 = flow_velocity(u + (0.5 * dt) * k1, n, opt);
    const GridFunction k3 = flow_velocity(u + (0.5 * dt) * k2, n, opt);
    const GridFunction k4 = flow_velocity(u + dt * k3, n, opt);
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool CurrentReport::pass(double tol_pointwise, double tol_mean) const {
    if (conservation > tol_pointwise || even_parity > tol_pointwise) return false;
    for (double d : j_vs_f1)
        if (d > tol_pointwise) return false;
    for (double m : mean_J)
        if (m > tol_mean) return false;
    return true;
}

CurrentReport current_check(const BlochWave& w, int D, int nmax) {
    const auto& shape = w.shape();
    const FieldSeries z = w.series();
    const FieldSeries zs = z.reflected();
    const FieldSeries ell = lift(w.ell_series(), shape);
    CurrentReport rep;
    rep.jz = times_k(zs * z, 2.0) + (zs * dz(z) - z * dz(zs));
    rep.jzbar = (ell * (zs * z)) * Complex(2.0) + (zs * dzbar(z) - z * dzbar(zs));

    double scale = 1.0;
    for (int p = 0; p >= rep.jz.bottom(); --p) scale = std::max(scale, rep.jz[p].max_abs());

    const FieldSeries cons = dzbar(rep.jz) + dz(rep.jzbar);
    rep.conservation = max_abs(cons, cons.bottom()) / scale;

    GridFunction head = rep.jz[1] - 2.0;
    rep.even_parity = head.max_abs() / scale;
    for (int p = 0; p >= rep.jz.bottom(); p -= 2)
        rep.even_parity = std::max(rep.even_parity, rep.jz[p].max_abs() / scale);

    const int exact = std::min((-rep.jz.bottom() - 1) / 2, (D - 1) / 2);
    if (nmax < 0 || nmax > exact) nmax = exact;
    const PseudoDiffOp L = dress(w, D);
    const PseudoDiffOp L2 = compose(L, L);
    PseudoDiffOp P = L;
    for (int n = 0; n <= nmax; ++n) {
        if (n > 0) P = compose(P, L2);
        GridFunction J = rep.jz[-2 * n - 1] * Complex(0.5);
        const GridFunction F1 = res_partial(P);
        rep.j_vs_f1.push_back((J - F1).max_abs() / std::max(1.0, F1.max_abs()));
        rep.mean_J.push_back(std::abs(torus::torus_mean(J)));
        rep.J.push_back(std::move(J));
    }
    return rep;
}

double plus_part_adjoint_defect(const PseudoDiffOp& L, int n) {
    const auto& shape = L.shape();
    const int D = L.depth();
    const PseudoDiffOp P = plus_part(power(L, 2 * n + 1));
    const PseudoDiffOp r = adjoint(P) + compose(compose(PseudoDiffOp::d(shape, D, 1), P),
                                                PseudoDiffOp::d(shape, D, -1));
    return max_rel(r, P.norm());
}

} // namespace nvsigma
