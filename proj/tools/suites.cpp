#include "suites.hpp"

#include <random>

#include "nvsigma/ecm.hpp"
#include "nvsigma/harmonic.hpp"
#include "nvsigma/nv.hpp"

namespace nvsigma::cli {

namespace {

TorusShape shape_of(const Scenario& s, const SuiteOptions& opt) {
    const int n = opt.grid > 0 ? opt.grid : s.grid;
    return TorusShape(s.tau, n, n);
}

int order_of(const Scenario& s, const SuiteOptions& opt) { return opt.order > 0 ? opt.order : s.order; }

const InstantonData& need_instanton(const Scenario& s, const std::string& suite) {
    if (!s.potential || s.potential->kind != PotentialSpec::Kind::instanton)
        throw SchemaError("suite " + suite + " needs an instanton potential");
    return s.potential->instanton;
}

GridFunction random_field(const TorusShape& shape, std::mt19937& rng) {
    std::normal_distribution<double> g;
    std::vector<std::tuple<int, int, Complex>> modes;
    for (int m = -2; m <= 2; ++m)
        for (int n = -2; n <= 2; ++n) modes.emplace_back(m, n, Complex(g(rng), g(rng)));
    return GridFunction::sample(shape, [&](double x, double y) {
        Complex v = 0.0;
        for (const auto& [m, n, c] : modes) v += c * std::exp(Complex(0.0, 2.0 * std::numbers::pi * (m * x + n * y)));
        return v;
    });
}

void linearized_checks(Report& r, const SphereMap& m, std::mt19937& rng) {
    const auto& q = m.q;
    const double a12 = 0.3, a13 = -0.7, a23 = 0.4;
    r.at_most("linearized_rotation",
              linearized_residual(m, {a12 * q[1] + a13 * q[2], -a12 * q[0] + a23 * q[2], -a13 * q[0] - a23 * q[1]}),
              1e-7);
    std::vector<GridFunction> tx, ty;
    for (const auto& c : q) {
        tx.push_back(torus::dx(c));
        ty.push_back(torus::dy(c));
    }
    r.at_most("linearized_translation_x", linearized_residual(m, tx), 1e-7);
    r.at_most("linearized_translation_y", linearized_residual(m, ty), 1e-7);
    std::vector<GridFunction> rnd;
    for (int i = 0; i < m.N(); ++i) rnd.push_back(random_field(m.shape(), rng));
    r.at_least("linearized_random", linearized_residual(m, rnd), 1e-2);
}

Report instanton_suite(const Scenario& s, const SuiteOptions& opt) {
    const auto& d = need_instanton(s, "instanton");
    const EllipticLattice lat(s.tau);
    d.validate(lat);
    const auto shape = shape_of(s, opt);
    const auto m = instanton_map(lat, d, shape, s.potential->rotation);
    const auto u = potential(m);
    Report r;
    r.at_most("norm", m.norm_defect(), 1e-10);
    const auto exact = instanton_potential_exact(lat, d, shape);
    r.at_most("potential_vs_exact", (u - exact).max_abs() / std::max(1.0, exact.max_abs()), 1e-8);
    r.at_most("schrodinger", schrodinger_residual(m, u), 1e-8);
    const auto T = relative_moments(m, opt.moments);
    for (int i = 1; i <= opt.moments; ++i) r.at_most("moment_T" + std::to_string(i), T[i], 1e-7);
    r.flag("w_infinity", wm_order(m, 3, 1e-6).infinite);
    r.near("instanton_charge", instanton_charge(m), double(d.a.size()), 1e-5);
    std::mt19937 rng(opt.seed);
    linearized_checks(r, m, rng);
    return r;
}

Report bloch_suite(const Scenario& s, const SuiteOptions& opt) {
    const auto shape = shape_of(s, opt);
    const int S = order_of(s, opt), D = s.depth;
    if (D > S - 1) throw SchemaError("depth must not exceed order - 1");
    const auto u = sample_potential(s, shape);
    const auto w = bloch_wave(u, S);
    Report r;
    double defect = 0.0;
    for (double x : w.defects) defect = std::max(defect, x);
    r.at_most("recursion_defect", defect, 1e-10);
    if (s.potential->kind == PotentialSpec::Kind::constant) {
        r.at_most("ell1_minus_c", std::abs(w.ells[0] - s.potential->value), 1e-14);
        double higher = 0.0;
        for (int k = 2; k <= S; ++k) higher = std::max(higher, std::abs(w.ells[k - 1]));
        r.at_most("ell_higher", higher, 1e-12);
    }
    BlochWave sd;
    try {
        sd = self_dualize(w).first;
        r.flag("self_dualize", true);
    } catch (const Error&) {
        r.flag("self_dualize", false);
        throw;
    }
    r.at_most("self_duality", self_duality_defect(sd), 1e-8);
    r.at_most("even_ell", ell_parity_defect(sd), 1e-8);
    const auto L = dress(sd, D);
    r.at_most("eigen_defect", eigen_defect(L, sd), 1e-8);
    r.at_most("bkp", bkp_residual(L).relative, 1e-8);
    for (int n = 0; 2 * n + 1 <= D; ++n) {
        r.at_most("F0_n" + std::to_string(n), flow_rhs(L, n, 1e300).f0_relative, 1e-7);
        const double scale = std::max(1.0, sd.zeta(2 * n + 1).max_abs());
        if (2 * n + 1 <= converged_order(sd))
            r.at_most("odd_residue_n" + std::to_string(n), odd_residue(sd, n).max_abs() / scale, 1e-8);
    }
    const auto c = current_check(sd, D);
    double pointwise = 0.0, mean = 0.0;
    for (double e : c.j_vs_f1) pointwise = std::max(pointwise, e);
    for (double x : c.mean_J) mean = std::max(mean, x);
    r.at_most("J_vs_F1", pointwise, 1e-8);
    r.at_most("current_conservation", c.conservation, 1e-8);
    r.at_most("current_odd_parity", c.even_parity, 1e-8);
    r.at_most("mean_J", mean, 1e-9);
    return r;
}

FlowOptions flow_options(const Scenario& s, const SuiteOptions& opt) {
    FlowOptions f;
    f.S = order_of(s, opt);
    f.D = s.depth;
    f.filter = s.filter;
    f.max_wavenumber = s.max_wavenumber;
    return f;
}

Report flow_suite(const Scenario& s, const SuiteOptions& opt) {
    const auto shape = shape_of(s, opt);
    const auto fo = flow_options(s, opt);
    const auto u = sample_potential(s, shape);
    Report r;
    for (int n = 0; 2 * n + 1 <= fo.D && n <= 2; ++n)
        r.at_most("velocity_mean_n" + std::to_string(n), std::abs(torus::torus_mean(flow_velocity(u, n, fo))), 1e-10);
    const double dt = 1e-3;
    const auto a = flow_step(flow_step(u, 1, dt, fo), 2, dt, fo);
    const auto b = flow_step(flow_step(u, 2, dt, fo), 1, dt, fo);
    r.at_most("commutator_t1_t2", (a - b).max_abs(), 1e-5);
    auto v = u;
    for (int i = 0; i < opt.steps; ++i) v = flow_step(v, 1, dt, fo);
    r.at_most("mean_drift", std::abs(torus::torus_mean(v) - torus::torus_mean(u)), 1e-10);
    return r;
}

Report ecm_suite(const Scenario& s, const SuiteOptions&) {
    const EllipticLattice lat(s.tau);
    Report r;
    if (s.particles) {
        const auto& c = *s.particles;
        c.validate(lat);
        const int N = c.N();
        const auto fit = fit_integrals(lat, c);
        r.at_most("fit_residual", fit.residual, 1e-8);
        const Complex alpha{0.173, 0.291};
        if (N >= 2) {
            const std::vector<Complex> alphas = {{0.11, 0.07}, {0.31, 0.22}, {0.17, 0.41}, {0.42, 0.13}, {0.23, 0.3}};
            Eigen::MatrixXcd M(alphas.size(), 2);
            Eigen::VectorXcd y(alphas.size());
            for (std::size_t i = 0; i < alphas.size(); ++i) {
                const Eigen::VectorXcd ev = lax(lat, c, alphas[i]).eigenvalues();
                Complex e2 = 0.0;
                for (int a = 0; a < N; ++a)
                    for (int b = a + 1; b < N; ++b) e2 += ev(a) * ev(b);
                M(i, 0) = 1.0;
                M(i, 1) = lat.wp(alphas[i]);
                y(i) = e2;
            }
            const Eigen::VectorXcd ab = M.colPivHouseholderQr().solve(y);
            r.at_most("c2_wp_slope", std::abs(ab(1) + N * (N - 1) / 2.0), 1e-8);
            r.near("branch_exponent_a1", branch_exponents(lat, c).front(), 1.0 - N, 0.05);
        }
        bool turning = true;
        for (auto p : c.rho) turning = turning && p == Complex(0.0);
        if (turning) {
            r.at_most("turning_antisymmetry",
                      (lax(lat, c, -alpha) + lax(lat, c, alpha).transpose()).cwiseAbs().maxCoeff(), 1e-10);
            double odd = 0.0;
            for (int l = 1; l <= N; l += 2) odd = std::max(odd, std::abs(fit.I.at(l)));
            r.at_most("I_odd", odd, 1e-8);
            r.at_most("involution", involution_residual(lat, fit.I), 1e-8);
        }
    } else if (s.integrals) {
        const auto& I = *s.integrals;
        double odd = 0.0;
        for (int l = 1; l <= I.N(); l += 2) odd = std::max(odd, std::abs(I.at(l)));
        bool finite = true;
        for (auto x : I.I) finite = finite && std::isfinite(x.real()) && std::isfinite(x.imag());
        r.flag("integrals_finite", finite);
        // the involution only holds when every odd integral vanishes
        if (odd == 0.0) r.at_most("involution", involution_residual(lat, I), 1e-8);
    } else {
        throw SchemaError("suite ecm needs an ecm section");
    }
    return r;
}

Report o3_suite(const Scenario& s, const SuiteOptions& opt) {
    const auto& d = need_instanton(s, "o3");
    if (!s.r) throw SchemaError("suite o3 needs o3.r");
    const EllipticLattice lat(s.tau);
    const auto shape = shape_of(s, opt);
    GridFunction num(shape), den(shape);
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex z = double(j) / shape.nx + shape.tau * (double(k) / shape.ny);
            std::tie(num(j, k), den(j, k)) = instanton_homogeneous(lat, d, z);
        }
    const auto [r1, r2, r3] = *s.r;
    const auto [f1, f2] = f_from_v(num, den, r1, r2);
    const auto rep = o3_reconstruct(f1, f2, r1, r2, r3);
    Report r;
    r.at_most("fg1", rep.fg1, 1e-8);
    r.at_most("fg2", rep.fg2, 1e-8);
    r.at_most("fg3", rep.fg3, 1e-8);
    r.at_most("c_discrepancy", rep.c_discrepancy, 1e-8);
    r.at_most("c_imag", rep.c_imag, 1e-8);
    r.at_most("unit_norm", rep.unit_norm, 1e-8);
    r.at_most("reality", rep.reality, 1e-8);
    r.at_most("v_identity", rep.v_identity, 1e-8);
    r.at_most("v_inverse", rep.v_inverse, 1e-8);
    r.at_most("masked_points", rep.masked, 0.0);
    const auto cd = s.potential->rotation.value_or(std::pair{std::polar(0.6, 0.4), std::polar(0.8, -1.1)});
    const auto u = potential(instanton_map(lat, d, shape));
    const auto moved = potential(instanton_map(lat, d, shape, cd));
    r.at_most("fractional_linear_u", (moved - u).max_abs() / std::max(1.0, u.max_abs()), 1e-8);
    return r;
}

} // namespace

Report run_suite(const std::string& suite, const Scenario& s, const SuiteOptions& opt) {
    if (suite == "instanton") return instanton_suite(s, opt);
    if (suite == "bloch") return bloch_suite(s, opt);
    if (suite == "flow") return flow_suite(s, opt);
    if (suite == "ecm") return ecm_suite(s, opt);
    if (suite == "o3") return o3_suite(s, opt);
    throw SchemaError("unknown suite " + suite);
}

nlohmann::ordered_json curve_report(const EllipticLattice& lat, const ECMIntegrals& I, int turning_n) {
    auto matrix = [](const Eigen::MatrixXcd& M) {
        auto rows = nlohmann::ordered_json::array();
        for (int i = 0; i < M.rows(); ++i) {
            auto row = nlohmann::ordered_json::array();
            for (int j = 0; j < M.cols(); ++j) row.push_back(cjson(M(i, j)));
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::ordered_json j;
    j["N"] = I.N();
    j["I"] = nlohmann::ordered_json::array();
    for (auto x : I.I) j["I"].push_back(cjson(x));
    j["involution_residual"] = involution_residual(lat, I);
    j["turning_table"] = matrix(turning_table(lat, I, 3));
    if (turning_n > 0) {
        j["turning_constraints"] = {{"n", turning_n},
                                    {"table", matrix(turning_constraints(lat, I, turning_n))},
                                    {"defect", turning_defect(lat, I, turning_n)}};
    }
    try {
        const auto cub = branch_cubic(lat, I);
        nlohmann::ordered_json c;
        c["b"] = nlohmann::ordered_json::array();
        for (auto b : cub.b) c["b"].push_back(cjson(b));
        c["roots"] = nlohmann::ordered_json::array();
        for (auto g : cub.roots) c["roots"].push_back(cjson(g));
        c["min_gap"] = cub.min_gap;
        c["distinct_warning"] = cub.distinct_warning;
        j["cubic"] = c;
    } catch (const ConstraintsNotMet& e) {
        j["cubic"] = {{"error", e.what()}};
    }
    j["cmsing"] = nlohmann::ordered_json::array();
    for (int k = 1; k <= 3; ++k) j["cmsing"].push_back(cjson(cmsing_value(lat, I, k)));
    return j;
}

} // namespace nvsigma::cli
