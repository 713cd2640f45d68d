#include "nvsigma/ba.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nvsigma/pdo.hpp"

namespace nvsigma {

using torus::Dir;

GridFunction BlochWave::zeta(int s) const {
    if (s == 0) return GridFunction::constant(shape(), 1.0);
    if (s < 0) return GridFunction(shape());
    return zetas.at(s - 1);
}

FieldSeries BlochWave::series() const {
    FieldSeries out(0, -S, GridFunction(shape()));
    for (int s = 0; s <= S; ++s) out[-s] = zeta(s);
    return out;
}

FormalSeries BlochWave::ell_series() const {
    FormalSeries out(-1, -S, Complex{});
    for (int s = 1; s <= S; ++s) out[-s] = ells[s - 1];
    return out;
}

BlochWave bloch_wave(const GridFunction& u_in, int S, const BlochOptions& opt) {
    if (S < 2) throw Error("bloch_wave needs S >= 2");
    BlochWave w;
    w.u = opt.filter > 0 ? torus::chop(u_in, opt.filter) : u_in;
    w.S = S;
    const auto& shape = w.u.shape();
    // d zeta_s is needed for every lower level; keep them.
    std::vector<GridFunction> dz{GridFunction(shape)};
    for (int s = 0; s < S; ++s) {
        const GridFunction zs = w.zeta(s);
        GridFunction rhs = w.u * zs - torus::derivative(zs, 1, 1);
        for (int j = 1; j <= s; ++j) {
            rhs -= w.ells[j - 1] * w.zeta(s + 1 - j);
            rhs -= w.ells[j - 1] * dz[s - j];
        }
        // zeta_{s+1-j} has zero mean for j <= s, so solvability fixes l_{s+1}
        const Complex ell = torus::torus_mean(rhs);
        rhs -= ell;
        GridFunction next = torus::solve_dzbar(rhs, opt.solve_tol);
        if (opt.filter > 0) next = torus::chop(next, opt.filter);
        // a roundoff-sized rhs (constant u) must not inflate the relative defect
        const double scale = std::max({rhs.max_abs(), w.u.max_abs(), 1e-300});
        w.defects.push_back(
            (torus::complex_derivative(next, Dir::zbar) - rhs).max_abs() / scale);
        w.ells.push_back(ell);
        dz.push_back(torus::complex_derivative(next, Dir::z));
        w.zetas.push_back(std::move(next));
    }
    return w;
}

FieldSeries dual_series(const BlochWave& w) {
    const auto& shape = w.shape();
    const int S = w.S;
    // derivatives d^j zeta_b for b + j <= S
    std::vector<std::vector<GridFunction>> dzeta;
    for (int b = 0; b <= S; ++b) dzeta.push_back(torus::z_derivatives(w.zeta(b), S - b));
    FieldSeries dual(0, -S, GridFunction(shape));
    dual[0] = GridFunction::constant(shape, 1.0);
    for (int s = 1; s <= S; ++s) {
        GridFunction acc(shape);
        for (int j = 0; j <= s; ++j) {
            const double c = double(binomial(s, j));
            for (int a = 0; a <= s - j; ++a) {
                const int b = s - j - a;
                if (j == 0 && a == s) continue;
                acc += c * (dual[-a] * dzeta[b][j]);
            }
        }
        dual[-s] = -acc;
    }
    return dual;
}

GridFunction dual_residue(const FieldSeries& dual, const BlochWave& w, int s) {
    const FieldSeries prod = dual * shifted_power(w.series(), s);
    return prod.get(0);
}

int converged_order(const BlochWave& w) { return std::max(1, w.S - 2); }

double self_duality_defect(const BlochWave& w, int max_s) {
    if (max_s < 0) max_s = converged_order(w);
    const FieldSeries dual = dual_series(w);
    double worst = 0.0;
    for (int s = 1; s <= std::min(max_s, w.S); ++s) {
        const GridFunction diff = dual[-s] - (s % 2 ? -1.0 : 1.0) * w.zeta(s);
        worst = std::max(worst, diff.max_abs() / std::max(1.0, w.zeta(s).max_abs()));
    }
    return worst;
}

BlochWave rescale(const BlochWave& w, const FormalSeries& r) {
    const FieldSeries scaled = w.series() * lift(r, w.shape());
    BlochWave out = w;
    for (int s = 1; s <= w.S; ++s) out.zetas[s - 1] = scaled.get(-s);
    return out;
}

std::pair<BlochWave, FormalSeries> self_dualize(const BlochWave& w,
                                                const SelfDualizeOptions& opt) {
    const FieldSeries dual = dual_series(w);
    const FieldSeries ratio = divide(w.series().reflected(), dual);
    const int top = converged_order(w);
    FormalSeries h(0, ratio.bottom(), Complex{});
    double hmax = 1.0;
    for (int p = 0; p >= ratio.bottom(); --p) {
        const Complex mean = torus::torus_mean(ratio[p]);
        h[p] = mean;
        if (-p > top) continue; // unconverged orders: mean only
        // an order is judged against the size of the fields it is built from
        const double scale = std::max({1.0, std::abs(mean), w.zeta(-p).max_abs(), dual[p].max_abs()});
        const double spread = (ratio[p].values() - mean).abs().maxCoeff();
        if (spread > opt.constant_tol * scale)
        {
            std::ostringstream msg;
            msg << "h_" << -p << " varies by " << spread / scale << " (relative) over the torus";
            throw NotConstantRatio(msg.str());
        }
        hmax = std::max(hmax, std::abs(mean));
    }
    for (int p = -1; p >= -top; p -= 2)
        if (std::abs(h[p]) > opt.odd_tol * hmax)
        {
            std::ostringstream msg;
            msg << "h_" << -p << " = " << h[p];
            throw OddObstruction(msg.str());
        }
    // even square root rho with rho^2 = h, rho_0 = 1
    FormalSeries rho(0, h.bottom(), Complex{});
    rho[0] = 1.0;
    for (int p = -2; p >= h.bottom(); p -= 2) {
        Complex acc = h[p];
        for (int a = -2; a > p; a -= 2) acc -= rho[a] * rho[p - a];
        rho[p] = 0.5 * acc;
    }
    FormalSeries one(0, h.bottom(), Complex{});
    one[0] = 1.0;
    return {rescale(w, divide(one, rho)), h};
}

GridFunction odd_residue(const BlochWave& w, int n) {
    const FieldSeries z = w.series();
    return (z.reflected() * shifted_power(z, 2 * n + 1)).get(0);
}

double ell_parity_defect(const BlochWave& w) {
    double worst = 0.0;
    for (int s = 2; s <= w.S; s += 2) worst = std::max(worst, std::abs(w.ells[s - 1]));
    return worst;
}

FormalSeries multiplier_exponents(const BlochWave& w, Axis dir) {
    FormalSeries out(1, -w.S, Complex{});
    const Complex tau = w.shape().tau;
    out[1] = dir == Axis::x ? Complex(1.0) : tau;
    const Complex tail = dir == Axis::x ? Complex(1.0) : std::conj(tau);
    for (int s = 1; s <= w.S; ++s) out[-s] = tail * w.ells[s - 1];
    return out;
}

namespace {

void save_csv(const GridFunction& f, const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    torus::write_csv(os, f);
}

GridFunction load_csv(const std::filesystem::path& p) {
    std::ifstream is(p);
    if (!is) throw ParseError("cannot open " + p.string());
    return torus::read_csv(is);
}

} // namespace

std::filesystem::path write_bloch(const BlochWave& w, const std::filesystem::path& stem) {
    nlohmann::json j;
    j["S"] = w.S;
    j["ells"] = nlohmann::json::array();
    for (const auto& l : w.ells) j["ells"].push_back({l.real(), l.imag()});
    const auto base = stem.filename().string();
    const auto dir = stem.parent_path();
    j["u"] = base + "_u.csv";
    save_csv(w.u, dir / j["u"].get<std::string>());
    j["zetas"] = nlohmann::json::array();
    for (int s = 1; s <= w.S; ++s) {
        const std::string name = base + "_zeta" + std::to_string(s) + ".csv";
        save_csv(w.zeta(s), dir / name);
        j["zetas"].push_back(name);
    }
    auto manifest = stem;
    manifest += ".json";
    std::ofstream os(manifest);
    if (!os) throw Error("cannot write " + manifest.string());
    os << j.dump(2) << "\n";
    return manifest;
}

BlochWave read_bloch(const std::filesystem::path& manifest) {
    std::ifstream is(manifest);
    if (!is) throw ParseError("cannot open " + manifest.string());
    nlohmann::json j;
    try {
        is >> j;
        BlochWave w;
        const auto dir = manifest.parent_path();
        w.S = j.at("S").get<int>();
        for (const auto& l : j.at("ells")) w.ells.emplace_back(l.at(0).get<double>(), l.at(1).get<double>());
        w.u = load_csv(dir / j.at("u").get<std::string>());
        for (const auto& name : j.at("zetas")) w.zetas.push_back(load_csv(dir / name.get<std::string>()));
        if (int(w.ells.size()) != w.S || int(w.zetas.size()) != w.S)
            throw ParseError("manifest lists " + std::to_string(w.zetas.size()) +
                             " zetas for S=" + std::to_string(w.S));
        for (const auto& z : w.zetas)
            if (z.shape() != w.u.shape()) throw ShapeMismatch("zeta grid differs from u grid");
        return w;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad bloch manifest: ") + e.what());
    }
}

} // namespace nvsigma
