#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "nvsigma/harmonic.hpp"

namespace nvsigma::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw SchemaError("unknown field '" + key + "' in " + where);
}

const json& required(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw SchemaError("missing field '" + key + "' in " + where);
    return j.at(key);
}

Complex complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(where + " must be a complex number [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Complex> complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + " must be an array of [re, im] pairs");
    std::vector<Complex> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(complex_from(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

int int_from(const json& j, const std::string& where, int lo) {
    if (!j.is_number_integer() || j.get<long long>() < lo)
        throw SchemaError(where + " must be an integer >= " + std::to_string(lo));
    return j.get<int>();
}

double number_from(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + " must be a number");
    return j.get<double>();
}

PotentialSpec potential_from(const json& j) {
    const std::string where = "potential";
    if (!j.is_object()) throw SchemaError("potential must be an object");
    const auto& kind = required(j, "kind", where);
    if (!kind.is_string()) throw SchemaError("potential.kind must be a string");
    PotentialSpec p;
    const auto k = kind.get<std::string>();
    if (k == "constant") {
        only_keys(j, where, {"kind", "value"});
        p.kind = PotentialSpec::Kind::constant;
        p.value = complex_from(required(j, "value", where), "potential.value");
    } else if (k == "modes") {
        only_keys(j, where, {"kind", "modes"});
        p.kind = PotentialSpec::Kind::modes;
        const auto& modes = required(j, "modes", where);
        if (!modes.is_array()) throw SchemaError("potential.modes must be an array");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const std::string w = "potential.modes[" + std::to_string(i) + "]";
            only_keys(modes[i], w, {"m", "n", "c"});
            ModeSpec md;
            md.m = int_from(required(modes[i], "m", w), w + ".m", -1 << 20);
            md.n = int_from(required(modes[i], "n", w), w + ".n", -1 << 20);
            md.c = complex_from(required(modes[i], "c", w), w + ".c");
            p.modes.push_back(md);
        }
    } else if (k == "instanton") {
        only_keys(j, where, {"kind", "A", "zeros", "poles", "rotation"});
        p.kind = PotentialSpec::Kind::instanton;
        p.instanton.A = j.contains("A") ? complex_from(j["A"], "potential.A") : Complex(1.0);
        p.instanton.a = complex_list(required(j, "zeros", where), "potential.zeros");
        p.instanton.b = complex_list(required(j, "poles", where), "potential.poles");
        if (j.contains("rotation")) {
            only_keys(j["rotation"], "potential.rotation", {"c", "d"});
            p.rotation = std::pair{complex_from(required(j["rotation"], "c", "potential.rotation"), "potential.rotation.c"),
                                   complex_from(required(j["rotation"], "d", "potential.rotation"), "potential.rotation.d")};
        }
    } else if (k == "csv") {
        only_keys(j, where, {"kind", "path"});
        p.kind = PotentialSpec::Kind::csv;
        const auto& path = required(j, "path", where);
        if (!path.is_string()) throw SchemaError("potential.path must be a string");
        p.csv = path.get<std::string>();
    } else {
        throw SchemaError("potential.kind must be one of constant, modes, instanton, csv");
    }
    return p;
}

} // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot read scenario " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    only_keys(j, "scenario", {"schema", "tau", "grid", "order", "depth", "seed", "potential", "flow", "ecm", "o3"});
    const auto& tag = required(j, "schema", "scenario");
    if (!tag.is_string() || tag.get<std::string>() != schema_tag)
        throw SchemaError(std::string("schema must be \"") + schema_tag + "\"");

    Scenario s;
    s.path = path;
    if (j.contains("tau")) s.tau = complex_from(j["tau"], "tau");
    if (!(s.tau.imag() > 0.0)) throw SchemaError("tau must have positive imaginary part");
    if (j.contains("grid")) s.grid = int_from(j["grid"], "grid", 4);
    if (s.grid % 2) throw SchemaError("grid must be even");
    if (j.contains("order")) s.order = int_from(j["order"], "order", 1);
    if (j.contains("depth")) s.depth = int_from(j["depth"], "depth", 1);
    if (j.contains("seed")) s.seed = unsigned(int_from(j["seed"], "seed", 0));
    if (j.contains("potential")) s.potential = potential_from(j["potential"]);
    if (j.contains("flow")) {
        only_keys(j["flow"], "flow", {"max_wavenumber", "filter"});
        if (j["flow"].contains("max_wavenumber")) s.max_wavenumber = int_from(j["flow"]["max_wavenumber"], "flow.max_wavenumber", 0);
        if (j["flow"].contains("filter")) s.filter = number_from(j["flow"]["filter"], "flow.filter");
    }
    if (j.contains("ecm")) {
        const auto& e = j["ecm"];
        only_keys(e, "ecm", {"particles", "integrals"});
        if (e.contains("particles") == e.contains("integrals"))
            throw SchemaError("ecm needs exactly one of particles, integrals");
        if (e.contains("particles")) {
            only_keys(e["particles"], "ecm.particles", {"z", "rho"});
            ECMConfig c;
            c.z = complex_list(required(e["particles"], "z", "ecm.particles"), "ecm.particles.z");
            c.rho = complex_list(required(e["particles"], "rho", "ecm.particles"), "ecm.particles.rho");
            if (c.z.empty() || c.z.size() != c.rho.size())
                throw SchemaError("ecm.particles.z and rho must be non-empty and of equal length");
            s.particles = c;
        } else {
            ECMIntegrals I;
            I.I = complex_list(e["integrals"], "ecm.integrals");
            if (I.I.empty()) throw SchemaError("ecm.integrals must be non-empty");
            s.integrals = I;
        }
    }
    if (j.contains("o3")) {
        only_keys(j["o3"], "o3", {"r"});
        const auto r = complex_list(required(j["o3"], "r", "o3"), "o3.r");
        if (r.size() != 3) throw SchemaError("o3.r must hold three complex numbers");
        s.r = std::array<Complex, 3>{r[0], r[1], r[2]};
    }
    return s;
}

GridFunction sample_potential(const Scenario& s, const TorusShape& shape) {
    if (!s.potential) throw SchemaError("scenario has no potential");
    const auto& p = *s.potential;
    switch (p.kind) {
    case PotentialSpec::Kind::constant:
        return GridFunction::constant(shape, p.value);
    case PotentialSpec::Kind::modes:
        return GridFunction::sample(shape, [&](double x, double y) {
            Complex v = 0.0;
            for (const auto& md : p.modes)
                v += md.c * std::exp(Complex(0.0, 2.0 * std::numbers::pi * (md.m * x + md.n * y)));
            return v;
        });
    case PotentialSpec::Kind::instanton: {
        const EllipticLattice lat(s.tau);
        return potential(instanton_map(lat, p.instanton, shape, p.rotation));
    }
    case PotentialSpec::Kind::csv: {
        const auto file = p.csv.is_absolute() ? p.csv : s.path.parent_path() / p.csv;
        std::ifstream is(file);
        if (!is) throw SchemaError("cannot read potential file " + file.string());
        auto u = torus::read_csv(is);
        if (!(u.shape() == shape)) throw SchemaError("potential file grid does not match the requested grid");
        return u;
    }
    }
    throw SchemaError("unreachable potential kind");
}

namespace {

double strict_number(const std::string& s, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw SchemaError("cannot parse '" + text + "' as a complex number");
    return v;
}

} // namespace

Complex parse_complex(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw SchemaError("empty complex number");
    if (t.back() != 'i' && t.back() != 'j') return {strict_number(t, text), 0.0};

    const std::string body = t.substr(0, t.size() - 1);
    // the imaginary part starts at the last sign that is not an exponent sign
    std::size_t split = 0;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    const std::string im = body.substr(split);
    const double b = im.empty() || im == "+" ? 1.0 : im == "-" ? -1.0 : strict_number(im, text);
    const double a = split ? strict_number(body.substr(0, split), text) : 0.0;
    return {a, b};
}

std::vector<Complex> parse_complex_list(const std::string& text) {
    std::vector<Complex> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(',', start);
        out.push_back(parse_complex(text.substr(start, end - start)));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

} // namespace nvsigma::cli
