#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "nvsigma/ecm.hpp"
#include "nvsigma/nv.hpp"
#include "scenario.hpp"
#include "suites.hpp"

using namespace nvsigma;
using namespace nvsigma::cli;
using nlohmann::ordered_json;

namespace {

constexpr int exit_pass = 0, exit_fail = 1, exit_usage = 2;

// NVSIGMA_THREADS must be a positive integer when set. Suites currently run serially.
int thread_cap() {
    const char* env = std::getenv("NVSIGMA_THREADS");
    if (!env) return 1;
    try {
        std::size_t used = 0;
        const int n = std::stoi(env, &used);
        if (used == std::string(env).size() && n > 0) return n;
    } catch (const std::exception&) {
    }
    throw SchemaError(std::string("NVSIGMA_THREADS must be a positive integer, got '") + env + "'");
}

void emit(const ordered_json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << j.dump(2) << "\n";
}

struct VerifyArgs {
    std::string suite, scenario, out;
    int grid = 0, order = 0, steps = 20, moments = 6;
    std::optional<unsigned> seed;
};

int cmd_verify(const VerifyArgs& a) {
    const auto s = load_scenario(a.scenario);
    SuiteOptions opt;
    opt.grid = a.grid;
    opt.order = a.order;
    opt.steps = a.steps;
    opt.moments = a.moments;
    if (a.moments < 1) throw SchemaError("--moments must be >= 1");
    opt.seed = a.seed.value_or(s.seed);
    if (opt.grid && (opt.grid < 4 || opt.grid % 2)) throw SchemaError("--grid must be even and >= 4");
    const auto rep = run_suite(a.suite, s, opt);
    ordered_json j;
    j["schema"] = schema_tag;
    j["suite"] = a.suite;
    j["scenario"] = a.scenario;
    j["grid"] = opt.grid ? opt.grid : s.grid;
    j["order"] = opt.order ? opt.order : s.order;
    j["seed"] = opt.seed;
    j["threads"] = thread_cap();
    j["checks"] = rep.to_json();
    j["all_pass"] = rep.all_pass();
    emit(j, a.out);
    for (const auto& c : rep.checks())
        if (!c.pass) std::cerr << "FAIL " << c.name << ": " << c.value << " (tolerance " << c.tolerance << ")\n";
    return rep.all_pass() ? exit_pass : exit_fail;
}

struct FlowArgs {
    std::string scenario, out;
    int n = 1, steps = 10, grid = 0;
    double dt = 1e-3, tolerance = 1e-10;
};

ordered_json flow_record(int step, double t, const GridFunction& u, const GridFunction& u0) {
    ordered_json r;
    r["step"] = step;
    r["t"] = t;
    r["mean"] = cjson(torus::torus_mean(u));
    r["max_abs"] = u.max_abs();
    r["delta"] = (u - u0).max_abs(); // max |u - u(0)|
    return r;
}

int cmd_flow(const FlowArgs& a) {
    const auto s = load_scenario(a.scenario);
    if (a.steps < 0) throw SchemaError("--steps must be >= 0");
    if (a.n < 0 || 2 * a.n + 1 > s.depth) throw SchemaError("--n needs 2n + 1 <= depth");
    const int N = a.grid ? a.grid : s.grid;
    const TorusShape shape(s.tau, N, N);
    FlowOptions fo;
    fo.S = s.order;
    fo.D = s.depth;
    fo.filter = s.filter;
    fo.max_wavenumber = s.max_wavenumber;

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw std::runtime_error("cannot write " + a.out);
    }
    std::ostream& os = a.out.empty() ? std::cout : file;

    const auto u0 = sample_potential(s, shape);
    auto u = u0;
    const Complex mean0 = torus::torus_mean(u);
    os << flow_record(0, 0.0, u, u0).dump() << "\n";
    if (a.steps == 0) return exit_pass;

    bool finite = true;
    int done = 0;
    for (int i = 1; i <= a.steps; ++i) {
        u = flow_step(u, a.n, a.dt, fo);
        done = i;
        os << flow_record(i, i * a.dt, u, u0).dump() << "\n";
        if (!u.all_finite()) {
            finite = false;
            break;
        }
    }
    const double drift = std::abs(torus::torus_mean(u) - mean0);
    const bool pass = finite && drift <= a.tolerance;
    ordered_json summary;
    summary["summary"] = true;
    summary["n"] = a.n;
    summary["steps"] = done;
    summary["mean_drift"] = finite ? ordered_json(drift) : ordered_json(nullptr);
    summary["tolerance"] = a.tolerance;
    summary["finite"] = finite;
    summary["pass"] = pass;
    os << summary.dump() << "\n";
    if (!pass) std::cerr << "flow: mean drift " << drift << " exceeds " << a.tolerance << (finite ? "" : " (non-finite field)") << "\n";
    return pass ? exit_pass : exit_fail;
}

struct EcmArgs {
    std::vector<std::string> particles;
    std::string integrals, tau = "1i", out;
    int check_turning = 0;
};

std::string strip_prefix(const std::string& arg, const std::string& key) {
    if (arg.rfind(key + "=", 0) != 0) throw SchemaError("expected " + key + "=..., got '" + arg + "'");
    return arg.substr(key.size() + 1);
}

int cmd_ecm(const EcmArgs& a) {
    if (a.particles.empty() == a.integrals.empty())
        throw SchemaError("give exactly one of --particles, --integrals");
    const Complex tau = parse_complex(a.tau);
    if (!(tau.imag() > 0.0)) throw SchemaError("--tau must have positive imaginary part");
    const EllipticLattice lat(tau);

    ordered_json j;
    int code = exit_pass;
    if (!a.particles.empty()) {
        ECMConfig c;
        for (const auto& arg : a.particles) {
            if (arg.rfind("z=", 0) == 0) c.z = parse_complex_list(strip_prefix(arg, "z"));
            else c.rho = parse_complex_list(strip_prefix(arg, "rho"));
        }
        if (c.z.empty() || c.z.size() != c.rho.size())
            throw SchemaError("--particles needs z=... and rho=... of equal length");
        c.validate(lat);
        const auto fit = fit_integrals(lat, c);
        j = curve_report(lat, fit.I, a.check_turning);
        j["fit_residual"] = fit.residual;
        j["fit_condition"] = fit.condition;
        if (!(fit.residual <= 1e-8)) {
            std::cerr << "ecm: fit residual " << fit.residual << " exceeds 1e-8\n";
            code = exit_fail;
        }
    } else {
        ECMIntegrals I;
        I.I = parse_complex_list(strip_prefix(a.integrals, "I"));
        j = curve_report(lat, I, a.check_turning);
    }
    ordered_json out;
    out["schema"] = schema_tag;
    out["tau"] = cjson(tau);
    for (auto& [k, v] : j.items()) out[k] = v;
    emit(out, a.out);
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nvsigma: verification driver"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run a check suite on a scenario");
    verify->add_option("--suite", va.suite, "instanton | bloch | flow | ecm | o3")
        ->required()
        ->check(CLI::IsMember({"instanton", "bloch", "flow", "ecm", "o3"}));
    verify->add_option("--scenario", va.scenario, "scenario JSON")->required();
    verify->add_option("--grid", va.grid, "override the grid size");
    verify->add_option("--order", va.order, "override the series order S");
    verify->add_option("--steps", va.steps, "flow suite step count");
    verify->add_option("--moments", va.moments, "instanton suite: check T_1..T_M");
    verify->add_option("--seed", va.seed, "seed for randomized controls");
    verify->add_option("--out", va.out, "report path (default: stdout)");

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow", "integrate a flow and write a JSON-lines trajectory");
    flow->add_option("--scenario", fa.scenario, "scenario JSON")->required();
    flow->add_option("--n", fa.n, "flow index, time t_{2n+1}");
    flow->add_option("--dt", fa.dt, "RK4 step");
    flow->add_option("--steps", fa.steps, "number of steps");
    flow->add_option("--grid", fa.grid, "override the grid size");
    flow->add_option("--tolerance", fa.tolerance, "allowed drift of mean(u)");
    flow->add_option("--out", fa.out, "trajectory path (default: stdout)");

    EcmArgs ea;
    auto* ecm = app.add_subcommand("ecm", "spectral curve report for the elliptic CM system");
    ecm->add_option("--particles", ea.particles, "z=z1,z2,... rho=r1,r2,...")->expected(1, 2);
    ecm->add_option("--integrals", ea.integrals, "I=I1,I2,...");
    ecm->add_option("--tau", ea.tau, "lattice parameter, e.g. 1i or 0.1+1.2i");
    ecm->add_option("--check-turning", ea.check_turning, "add the turning constraints of this order");
    ecm->add_option("--out", ea.out, "report path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_pass : exit_usage;
    }

    try {
        thread_cap();
        if (*verify) return cmd_verify(va);
        if (*flow) return cmd_flow(fa);
        if (*ecm) return cmd_ecm(ea);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_fail;
    }
    return exit_usage;
}
