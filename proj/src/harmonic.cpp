#include "nvsigma/harmonic.hpp"

#include <fstream>
#include <numbers>

#include "json.hpp"
#include "nvsigma/nv.hpp"
#include "nvsigma/pdo.hpp"

namespace nvsigma {

using torus::Dir;

namespace {

const Complex I{0.0, 1.0};

GridFunction dz1(const GridFunction& f) { return torus::complex_derivative(f, Dir::z); }
GridFunction dzb1(const GridFunction& f) { return torus::complex_derivative(f, Dir::zbar); }

std::pair<GridFunction, GridFunction> homogeneous_grid(const EllipticLattice& lat,
                                                       const InstantonData& d,
                                                       const TorusShape& shape) {
    GridFunction num(shape), den(shape);
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const auto [n, m] = instanton_homogeneous(lat, d, shape.node(j, k));
            num(j, k) = n;
            den(j, k) = m;
        }
    return {num, den};
}

} // namespace

double SphereMap::norm_defect() const {
    return (pair(q, q).values() - 1.0).abs().maxCoeff();
}

double SphereMap::imag_defect() const {
    double m = 0.0;
    for (const auto& c : q) m = std::max(m, c.values().imag().abs().maxCoeff());
    return m;
}

GridFunction pair(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b) {
    if (a.size() != b.size() || a.empty()) throw ShapeMismatch("pairing needs equal component counts");
    GridFunction s = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

SphereMap stereographic(const GridFunction& v, double overflow_guard) {
    const auto& shape = v.shape();
    GridFunction num(shape), den(shape);
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex x = v(j, k);
            if (!(std::abs(x) <= overflow_guard)) { // also catches inf/nan as the point at infinity
                num(j, k) = 1.0;
                den(j, k) = 0.0;
            } else {
                num(j, k) = x;
                den(j, k) = 1.0;
            }
        }
    return stereographic(num, den);
}

SphereMap stereographic(const GridFunction& num, const GridFunction& den) {
    const auto& shape = num.shape();
    SphereMap m;
    m.is_real = true;
    m.q.assign(3, GridFunction(shape));
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex a = num(j, k), b = den(j, k);
            const double n2 = std::norm(a), d2 = std::norm(b), s = n2 + d2;
            const Complex w = 2.0 * a * std::conj(b) / s;
            m.q[0](j, k) = w.real();
            m.q[1](j, k) = w.imag();
            m.q[2](j, k) = (d2 - n2) / s;
        }
    return m;
}

SphereMap instanton_map(const EllipticLattice& lat, const InstantonData& d,
                        const TorusShape& shape, std::optional<std::pair<Complex, Complex>> cd) {
    d.validate(lat);
    auto [num, den] = homogeneous_grid(lat, d, shape);
    if (cd) {
        check_unitary_pair(cd->first, cd->second);
        for (int k = 0; k < shape.ny; ++k)
            for (int j = 0; j < shape.nx; ++j) {
                const auto t = fractional_linear({num(j, k), den(j, k)}, cd->first, cd->second);
                num(j, k) = t.first;
                den(j, k) = t.second;
            }
    }
    return stereographic(num, den);
}

GridFunction instanton_potential_exact(const EllipticLattice& lat, const InstantonData& d,
                                       const TorusShape& shape) {
    GridFunction u(shape);
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex z = shape.node(j, k);
            const auto [a, b] = instanton_homogeneous(lat, d, z);
            const double n2 = std::norm(a), d2 = std::norm(b), s = n2 + d2;
            // |v'|^2/(1+|v|^2)^2 = |v'/v|^2 |num|^2 |den|^2 / (|num|^2 + |den|^2)^2
            const Complex ld = instanton_log_derivative(lat, d, z);
            u(j, k) = -2.0 * std::norm(ld) * (n2 / s) * (d2 / s);
        }
    return u;
}

GridFunction potential(const SphereMap& m) {
    GridFunction u(m.shape());
    for (const auto& c : m.q) u -= dz1(c) * dzb1(c);
    return u;
}

double schrodinger_residual(const SphereMap& m, const GridFunction& u) {
    double worst = 0.0;
    for (const auto& c : m.q) {
        const GridFunction r = u * c - torus::derivative(c, 1, 1);
        worst = std::max(worst, r.max_abs() / std::max(1.0, c.max_abs()));
    }
    return worst;
}

MomentTable moments(const SphereMap& m, int M) {
    MomentTable T(M + 1, GridFunction(m.shape()));
    for (const auto& c : m.q) {
        const auto d = torus::z_derivatives(c, M);
        for (int i = 0; i <= M; ++i) T[i] += c * d[i];
    }
    return T;
}

std::vector<double> relative_moments(const SphereMap& m, int M) {
    std::vector<double> scale(M + 1, 1.0);
    MomentTable T(M + 1, GridFunction(m.shape()));
    for (const auto& c : m.q) {
        const auto d = torus::z_derivatives(c, M);
        for (int i = 0; i <= M; ++i) {
            T[i] += c * d[i];
            scale[i] = std::max(scale[i], d[i].max_abs());
        }
    }
    std::vector<double> out(M + 1);
    for (int i = 0; i <= M; ++i) out[i] = T[i].max_abs() / scale[i];
    return out;
}

MomentTable fermi_moments(const BlochWave& w, int m, int M) {
    const FieldSeries z = w.series();
    const FieldSeries zs = z.reflected();
    MomentTable f;
    for (int i = 0; i <= M; ++i) f.push_back(-(zs * shifted_power(z, i)).get(2 * m));
    return f;
}

double moment_recursion_residual(const MomentTable& T, const GridFunction& u, int i) {
    if (i < 2 || i >= int(T.size())) throw Error("moment index out of range");
    const auto du = torus::z_derivatives(u, i - 1);
    GridFunction inner(u.shape()), outer(u.shape());
    for (int l = 0; l <= i - 2; ++l) {
        inner += double(binomial(i - 2, l)) * (T[l] * du[i - l - 2]);
        outer += double(binomial(i - 1, l)) * (T[l] * du[i - 1 - l]);
    }
    const GridFunction lhs = dzb1(T[i]);
    const GridFunction a = dz1(dzb1(T[i - 1]));
    const GridFunction b = dz1(inner);
    const GridFunction r = lhs - (a - b + outer);
    const double scale = std::max({lhs.max_abs(), a.max_abs(), b.max_abs(), outer.max_abs(), 1e-300});
    return r.max_abs() / scale;
}

WmOrder wm_order(const SphereMap& m, int maxj, double tol) {
    WmOrder out;
    std::vector<std::vector<GridFunction>> d;
    for (const auto& c : m.q) d.push_back(torus::z_derivatives(c, maxj));
    bool failed = false;
    for (int j = 1; j <= maxj; ++j) {
        GridFunction s(m.shape());
        double scale = 1.0;
        for (const auto& dc : d) {
            s += dc[j] * dc[j];
            scale = std::max(scale, dc[j].max_abs() * dc[j].max_abs());
        }
        out.values.push_back(s.max_abs() / scale);
        if (!failed && out.values.back() > tol) {
            failed = true;
            out.m = j;
        }
    }
    if (!failed) {
        out.m = maxj;
        out.infinite = true;
    }
    return out;
}

double constraint_pairing(const SphereMap& m, const BlochWave& w, int n, int D) {
    const PseudoDiffOp P = plus_part(power(dress(w, D), 2 * n + 1));
    GridFunction s(m.shape());
    double scale = 1.0;
    for (const auto& c : m.q) {
        const GridFunction pc = apply(P, c);
        scale = std::max(scale, pc.max_abs());
        s += c * pc;
    }
    return s.max_abs() / scale;
}

double linearized_residual(const SphereMap& m, const std::vector<GridFunction>& V) {
    if (V.size() != m.q.size()) throw ShapeMismatch("vector field has the wrong component count");
    std::vector<GridFunction> dq, dbq, dV, dbV;
    for (const auto& c : m.q) {
        dq.push_back(dz1(c));
        dbq.push_back(dzb1(c));
    }
    for (const auto& c : V) {
        dV.push_back(dz1(c));
        dbV.push_back(dzb1(c));
    }
    const GridFunction s1 = pair(dbq, dV), s2 = pair(dq, dbV), s3 = pair(dq, dbq);
    double res = 0.0, scale = 1e-300;
    for (std::size_t a = 0; a < V.size(); ++a) {
        const GridFunction t1 = torus::derivative(V[a], 1, 1);
        const GridFunction t2 = m.q[a] * s1, t3 = m.q[a] * s2, t4 = s3 * V[a];
        res = std::max(res, (t1 + t2 + t3 + t4).max_abs());
        scale = std::max({scale, t1.max_abs(), t2.max_abs(), t3.max_abs(), t4.max_abs()});
    }
    return res / scale;
}

double instanton_charge(const SphereMap& m) {
    if (m.N() != 3) throw Error("instanton_charge needs a map into S^2");
    std::vector<Eigen::ArrayXXd> q, qx, qy;
    for (const auto& c : m.q) {
        q.push_back(c.values().real());
        qx.push_back(torus::dx(c).values().real());
        qy.push_back(torus::dy(c).values().real());
    }
    const Eigen::ArrayXXd density = q[0] * (qx[1] * qy[2] - qx[2] * qy[1]) +
                                    q[1] * (qx[2] * qy[0] - qx[0] * qy[2]) +
                                    q[2] * (qx[0] * qy[1] - qx[1] * qy[0]);
    return density.mean() / (4.0 * std::numbers::pi);
}

double O3Report::worst() const {
    return std::max({fg1, fg2, fg3, c_discrepancy, c_imag, unit_norm, reality, v_identity,
                     v_inverse});
}

std::pair<GridFunction, GridFunction> f_from_v(const GridFunction& num, const GridFunction& den,
                                               Complex r1, Complex r2) {
    // (v + 1/v) = (num^2 + den^2)/(num den)
    const GridFunction nd = num * den;
    GridFunction f1 = (num * num + den * den) / nd, f2 = (num * num - den * den) / nd;
    f1 *= 1.0 / (2.0 * r1);
    f2 *= 1.0 / (2.0 * I * r2);
    return {f1, f2};
}

O3Report o3_reconstruct(const GridFunction& f1, const GridFunction& f2, Complex r1, Complex r2,
                        Complex r3) {
    if (std::abs(r1 * r1 + r2 * r2 + r3 * r3 - 1.0) > 1e-10)
        throw FGViolation("r1^2 + r2^2 + r3^2 != 1");
    const auto& shape = f1.shape();
    O3Report rep;
    const Complex h = I * r1 * r2 * r3;
    const Complex R1 = r1 * r1, R2 = r2 * r2, R3 = r3 * r3;

    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex a = R1 * f1(j, k) * f1(j, k), b = R2 * f2(j, k) * f2(j, k);
            rep.fg1 = std::max(rep.fg1, std::abs(a + b - 1.0) / std::max(1.0, std::abs(a) + std::abs(b)));
        }
    if (rep.fg1 > 1e-8)
        throw FGViolation("r1^2 f1^2 + r2^2 f2^2 - 1 reaches " + std::to_string(rep.fg1));

    rep.y.is_real = true;
    rep.y.q.assign(3, GridFunction(shape));
    int both_bad = 0;
    for (int k = 0; k < shape.ny; ++k)
        for (int j = 0; j < shape.nx; ++j) {
            const Complex F1 = f1(j, k), F2 = f2(j, k);
            Complex g1 = 0.0, g2 = 0.0, c = 0.0;
            const double fscale = std::max({1.0, std::abs(F1), std::abs(F2)});
            if (h != 0.0) {
                g1 = (h / R1) * F2;
                g2 = -(h / R2) * F1;
                const Complex den1 = F2 + std::conj(F2), den2 = F1 + std::conj(F1);
                const bool ok1 = std::abs(den1) > 1e-8 * fscale, ok2 = std::abs(den2) > 1e-8 * fscale;
                const Complex c1 = ok1 ? -(R1 / h) * (F1 - std::conj(F1)) / den1 : Complex{};
                const Complex c2 = ok2 ? (R2 / h) * (F2 - std::conj(F2)) / den2 : Complex{};
                if (!ok1) ++rep.masked;
                if (!ok1 && !ok2) {
                    ++both_bad;
                    continue;
                }
                c = ok1 && ok2 ? (std::abs(den1) >= std::abs(den2) ? c1 : c2) : (ok1 ? c1 : c2);
                if (ok1 && ok2)
                    rep.c_discrepancy = std::max(rep.c_discrepancy,
                                                 std::abs(c1 - c2) / std::max(1.0, std::abs(c)));
            }
            const double gscale = std::max(1.0, std::abs(R1 * g1 * g1) + std::abs(R2 * g2 * g2));
            rep.fg2 = std::max(rep.fg2, std::abs(R1 * g1 * g1 + R2 * g2 * g2 + R3) / gscale);
            const double mscale =
                std::max(1.0, std::abs(R1 * F1 * g1) + std::abs(R2 * F2 * g2));
            rep.fg3 = std::max(rep.fg3, std::abs(R1 * F1 * g1 + R2 * F2 * g2) / mscale);
            rep.c_imag = std::max(rep.c_imag, std::abs(c.imag()) / std::max(1.0, std::abs(c)));

            const Complex psi1 = F1 + c * (h / R1) * F2;
            const Complex psi2 = F2 - c * (h / R2) * F1;
            const Complex y1 = r1 * psi1, y2 = r2 * psi2, y3 = r3 * c;
            rep.y.q[0](j, k) = y1;
            rep.y.q[1](j, k) = y2;
            rep.y.q[2](j, k) = y3;
            const double yscale = std::max(1.0, std::norm(y1) + std::norm(y2) + std::norm(y3));
            rep.unit_norm = std::max(rep.unit_norm, std::abs(y1 * y1 + y2 * y2 + y3 * y3 - 1.0) / yscale);
            rep.reality = std::max({rep.reality, std::abs(y1.imag()), std::abs(y2.imag()),
                                    std::abs(y3.imag())} ) ;
            const Complex v = r1 * F1 + I * r2 * F2, vinv = r1 * F1 - I * r2 * F2;
            if (std::abs(1.0 + y3) >= std::abs(1.0 - y3)) {
                const Complex vr = (y1 + I * y2) / (1.0 + y3);
                rep.v_identity = std::max(rep.v_identity, std::abs(vr - v) / std::max(1.0, std::abs(v)));
            } else {
                const Complex vr = (y1 - I * y2) / (1.0 - y3);
                rep.v_identity =
                    std::max(rep.v_identity, std::abs(vr - vinv) / std::max(1.0, std::abs(vinv)));
            }
            rep.v_inverse = std::max(rep.v_inverse, std::abs(v * vinv - 1.0) /
                                                        std::max(1.0, std::abs(v) * std::abs(vinv)));
        }
    if (both_bad)
        throw DegenerateDenominator(std::to_string(both_bad) +
                                    " grid points where both expressions for c are undefined");
    return rep;
}

std::filesystem::path write_map(const SphereMap& m, const std::filesystem::path& stem) {
    nlohmann::json j;
    j["N"] = m.N();
    j["is_real"] = m.is_real;
    j["components"] = nlohmann::json::array();
    const auto base = stem.filename().string();
    for (int i = 0; i < m.N(); ++i) {
        const std::string name = base + "_q" + std::to_string(i + 1) + ".csv";
        std::ofstream os(stem.parent_path() / name);
        if (!os) throw Error("cannot write " + name);
        torus::write_csv(os, m.q[i]);
        j["components"].push_back(name);
    }
    auto manifest = stem;
    manifest += ".json";
    std::ofstream os(manifest);
    if (!os) throw Error("cannot write " + manifest.string());
    os << j.dump(2) << "\n";
    return manifest;
}

SphereMap read_map(const std::filesystem::path& manifest) {
    std::ifstream is(manifest);
    if (!is) throw ParseError("cannot open " + manifest.string());
    try {
        nlohmann::json j;
        is >> j;
        SphereMap m;
        m.is_real = j.at("is_real").get<bool>();
        for (const auto& name : j.at("components")) {
            std::ifstream cs(manifest.parent_path() / name.get<std::string>());
            if (!cs) throw ParseError("cannot open component " + name.get<std::string>());
            m.q.push_back(torus::read_csv(cs));
        }
        if (m.N() != j.at("N").get<int>()) throw ParseError("component count does not match N");
        for (const auto& c : m.q)
            if (c.shape() != m.q[0].shape()) throw ShapeMismatch("components on different grids");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad map manifest: ") + e.what());
    }
}

} // namespace nvsigma
