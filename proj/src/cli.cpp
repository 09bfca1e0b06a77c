#include "ksing/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ksing/criteria.hpp"
#include "ksing/errors.hpp"
#include "ksing/green.hpp"
#include "ksing/mass.hpp"
#include "ksing/measure_solvers.hpp"
#include "ksing/radial.hpp"
#include "ksing/report_io.hpp"
#include "ksing/strong_solvers.hpp"

namespace ksing {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
    int N = 3;
    double p = 2.0;
    double theta = 0.0;
    double k = 1.0;
    double lambda = 1.0;
    double rmin = kDefaultRMin;
    int nodes = 0;  // 0 = fall back to config, then KS_DEFAULT_NODES, then 4096
    double tol = kNaN;
    int max_iter = 0;
    bool from_barrier_top = false;
    std::string out;
    std::string format = "json";
    std::string regime;
    std::string target;
    std::string suite = "closed-forms";
    double lo = 0.0, hi = 0.0;
    int count = 0;
    std::string config;  // consumed by the pre-scan; registered so CLI11 accepts it
};

int exit_code_for(const Error& e) {
    const std::string& c = e.code();
    if (c == "no-convergence" || c == "barrier-escape" || c == "bracket-failure" ||
        c == "shooting-failure")
        return 3;
    return 2;
}

// --config is applied before CLI11 runs, so explicit flags win
std::optional<std::string> scan_config_path(int argc, const char* const* argv,
                                            std::string& err) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config") {
            if (i + 1 >= argc) {
                err = "--config is missing its file argument";
                return std::nullopt;
            }
            return std::string(argv[i + 1]);
        }
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return std::nullopt;
}

bool apply_config(const std::string& path, Options& o, std::string& err) {
    std::ifstream in(path);
    if (!in) {
        err = "config file '" + path + "' cannot be read";
        return false;
    }
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        err = "config file '" + path + "' is not valid JSON";
        return false;
    }
    if (!j.is_object()) {
        err = "config file '" + path + "' must hold a JSON object";
        return false;
    }
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const nlohmann::json& v = item.value();
        try {
            if (key == "N")
                o.N = v.get<int>();
            else if (key == "p")
                o.p = v.get<double>();
            else if (key == "theta")
                o.theta = v.get<double>();
            else if (key == "k")
                o.k = v.get<double>();
            else if (key == "lambda")
                o.lambda = v.get<double>();
            else if (key == "rmin")
                o.rmin = v.get<double>();
            else if (key == "nodes")
                o.nodes = v.get<int>();
            else if (key == "tol")
                o.tol = v.get<double>();
            else if (key == "max_iter")
                o.max_iter = v.get<int>();
            else if (key == "out")
                o.out = v.get<std::string>();
            else if (key == "format")
                o.format = v.get<std::string>();
            else if (key == "regime")
                o.regime = v.get<std::string>();
            else if (key == "target")
                o.target = v.get<std::string>();
            else if (key == "suite")
                o.suite = v.get<std::string>();
            else if (key == "lo")
                o.lo = v.get<double>();
            else if (key == "hi")
                o.hi = v.get<double>();
            else if (key == "count")
                o.count = v.get<int>();
            else {
                err = "config field '" + key + "' is not recognized";
                return false;
            }
        } catch (const nlohmann::json::exception&) {
            err = "config field '" + key + "' has the wrong type";
            return false;
        }
    }
    return true;
}

bool resolve_nodes(Options& o, std::string& err) {
    if (o.nodes != 0) return true;
    if (const char* env = std::getenv("KS_DEFAULT_NODES")) {
        char* endp = nullptr;
        const long v = std::strtol(env, &endp, 10);
        if (endp == env || *endp != '\0' || v <= 0) {
            err = "KS_DEFAULT_NODES is set but is not a positive integer";
            return false;
        }
        o.nodes = static_cast<int>(v);
        return true;
    }
    o.nodes = kDefaultNodes;
    return true;
}

Params params_for(const Options& o) { return Params{o.N, o.p, o.theta, o.k}; }

GridPtr grid_for(const Options& o) { return make_grid(o.rmin, o.nodes); }

double tol_or(const Options& o, double fallback) {
    return std::isnan(o.tol) ? fallback : o.tol;
}

int iters_or(const Options& o, int fallback) {
    return o.max_iter > 0 ? o.max_iter : fallback;
}

int write_payload(const Options& o, const std::string& payload) {
    if (o.out.empty()) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        return 0;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file '" << o.out << "'\n";
        return 1;
    }
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    return f ? 0 : 1;
}

void write_failure_report(const Options& o, const Error& e) {
    if (o.out.empty()) return;
    JsonWriter w;
    w.begin();
    w.str("status", "error");
    w.str("reason", e.code());
    w.str("message", e.what());
    std::ofstream f(o.out, std::ios::binary);
    if (f) f << w.end() << "\n";
}

std::string csv_profile(const RadialFn& u, const std::vector<double>& residual) {
    std::ostringstream os;
    write_profile_csv(os, u, residual);
    return os.str();
}

// pointwise residual of -Δu = f for the CSV table
std::vector<double> strong_form_residual(const RadialFn& u, const RadialFn& f,
                                         const Params& P) {
    return operator_residual_pointwise(u, f, P);
}

StrongRegime regime_from(const std::string& s) {
    return s == "absorption" ? StrongRegime::absorption : StrongRegime::source;
}

// ---- subcommand bodies ------------------------------------------------------

int run_constants(const Options& o) {
    Params P = params_for(o);
    P.validate();
    ConstantsReport rep;
    rep.N = P.N;
    rep.p = P.p;
    rep.theta = P.theta;
    rep.k = P.k;
    rep.sigma_N = P.sigma_N();
    rep.c_N = P.c_N();
    rep.p_star = P.p_star();
    rep.theta_minus = P.theta_minus();
    rep.a_p = kNaN;
    if (P.p < P.p_star()) rep.a_p = compute_ap(P, grid_for(o));
    rep.s_p = std::pow(P.p / (P.p - 1.0), P.p);
    rep.t_p = P.theta + P.k > 0.0 ? rep.s_p / (P.theta + P.k) : kNaN;
    auto coeff_or_nan = [&](CoeffRegime r) {
        try {
            return singularity_coeff(P, r);
        } catch (const Error&) {
            return kNaN;
        }
    };
    rep.c_absorption = coeff_or_nan(CoeffRegime::absorption_subcritical);
    rep.c_source = coeff_or_nan(CoeffRegime::source_supercritical);
    rep.c_critical = coeff_or_nan(CoeffRegime::source_critical);
    return write_payload(o, to_json(rep) + "\n");
}

int run_condition(const Options& o) {
    Params P = params_for(o);
    const double a_p = compute_ap(P, grid_for(o));
    ConditionReport rep = check_condition(P, a_p);
    return write_payload(o, to_json(rep) + "\n");
}

int run_weak_solve(const Options& o) {
    Params P = params_for(o);
    SolveReport rep = weak_singularity_solve(P, grid_for(o), tol_or(o, 1e-6),
                                             iters_or(o, 200), o.from_barrier_top);
    if (o.format == "csv") {
        RadialFn up = pow_fn(rep.profile, P.p);
        RadialFn f = axpy(1.0 / rep.m_theta, up, 0.0, up);
        return write_payload(o, csv_profile(rep.profile, strong_form_residual(rep.profile, f, P)));
    }
    return write_payload(o, to_json(rep) + "\n");
}

int run_absorption_solve(const Options& o) {
    Params P = params_for(o);
    SolveReport rep =
        absorption_solve(P, o.lambda, grid_for(o), tol_or(o, 1e-10), iters_or(o, 400));
    if (o.format == "csv") {
        RadialFn up = pow_fn(rep.profile, P.p);
        RadialFn f = axpy(-o.lambda, up, 0.0, up);
        return write_payload(o, csv_profile(rep.profile, strong_form_residual(rep.profile, f, P)));
    }
    return write_payload(o, to_json(rep) + "\n");
}

int run_neg_branch(const Options& o) {
    Params P = params_for(o);
    BranchReport rep = negative_branch_solve(P, grid_for(o), tol_or(o, 1e-8));
    return write_payload(o, to_json(rep) + "\n");
}

int run_strong_profile(const Options& o) {
    Params P = params_for(o);
    const StrongRegime regime = regime_from(o.regime);
    ProfileReport rep = strong_profile(P, regime, grid_for(o), tol_or(o, 1e-6));
    if (o.format == "csv") {
        RadialFn up = pow_fn(rep.profile, P.p);
        const double sgn = regime == StrongRegime::source ? 1.0 : -1.0;
        RadialFn f = axpy(sgn, up, 0.0, up);
        return write_payload(o, csv_profile(rep.profile, strong_form_residual(rep.profile, f, P)));
    }
    return write_payload(o, to_json(rep) + "\n");
}

int run_super_branch(const Options& o) {
    Params P = params_for(o);
    const StrongRegime regime = regime_from(o.regime);
    EndToEndResult res = end_to_end_strong(P, regime, grid_for(o), tol_or(o, 1e-6));
    if (o.format == "csv") {
        RadialFn up = pow_fn(res.scaled_profile, P.p);
        RadialFn f = axpy(1.0 / res.summary.m_theta, up, 0.0, up);
        return write_payload(
            o, csv_profile(res.scaled_profile, strong_form_residual(res.scaled_profile, f, P)));
    }
    return write_payload(o, to_json(res) + "\n");
}

int run_bootstrap(const Options& o) {
    Params P = params_for(o);
    BootstrapLedger rep = bootstrap_ledger(P);
    return write_payload(o, to_json(rep) + "\n");
}

struct VerifyCheck {
    std::string name;
    bool pass;
    double measured;
    double expected;
};

int run_verify(const Options& o) {
    const double pi = 3.14159265358979323846;
    GridPtr g = grid_for(o);
    std::vector<VerifyCheck> checks;

    {
        Params P{3, 2.0, 0.0, 1.0};
        const double ap = compute_ap(P, g);
        checks.push_back({"a_p N=3 p=2", std::abs(ap * 12.0 * pi - 1.0) <= 1e-4, ap,
                          1.0 / (12.0 * pi)});
    }
    {
        Params P{2, 2.0, 0.0, 1.0};
        const double ap = compute_ap(P, g);
        checks.push_back(
            {"a_p N=2 p=2", std::abs(ap * 8.0 * pi - 1.0) <= 1e-4, ap, 1.0 / (8.0 * pi)});
    }
    {
        Params P{3, 2.0, 0.0, 1.0};
        PotentialPair pots = potential_pair(P, g);
        int at = 0;
        for (int i = 0; i < g->size(); ++i)
            if (std::abs(g->nodes[i] - 0.5) < std::abs(g->nodes[at] - 0.5)) at = i;
        const double r = g->nodes[at];
        const double w1_exact =
            (3.0 * (r - 1.0) - 3.0 * std::log(r) - 0.5 * (r * r - 1.0)) /
            (48.0 * pi * pi);
        const double got = pots.w1.values[at];
        checks.push_back(
            {"w1 closed form N=3 p=2", std::abs(got - w1_exact) <= 1e-8, got, w1_exact});
    }
    {
        const double p = 2.0;
        const double sp = std::pow(p / (p - 1.0), p);
        const double slope = (1.0 / p) * std::pow((p - 1.0) / p, p - 1.0);
        const double f_sp = std::pow(slope * sp + 1.0, p);
        checks.push_back({"barrier tangency p=2", std::abs(f_sp - sp) <= 1e-12, f_sp, sp});
    }
    {
        Params P{3, 2.0, 0.0, 1.0};
        BootstrapLedger led = bootstrap_ledger(P);
        const bool ok = led.t_seq.size() == 2 && std::abs(led.t_seq[0] - 1.25) <= 1e-12 &&
                        std::abs(led.t_seq[1] - 3.75) <= 1e-12 && led.m0 == 1;
        checks.push_back({"bootstrap N=3 p=2", ok,
                          led.t_seq.empty() ? kNaN : led.t_seq.back(), 3.75});
    }
    {
        Params P{3, 2.0, 0.0, 1.0};
        MassReport mr = gradient_mass(dirac_potential(P, g), P);
        checks.push_back(
            {"grad mass of w0, N=3", std::abs(mr.grad_mass - 1.0) <= 1e-6, mr.grad_mass, 1.0});
    }

    bool all = true;
    std::string lines;
    for (const VerifyCheck& c : checks) {
        all = all && c.pass;
        lines += std::string(c.pass ? "ok   " : "FAIL ") + c.name + "\n";
    }
    JsonWriter w;
    w.begin();
    w.str("suite", o.suite);
    w.boolean("passed", all);
    w.begin_arr("checks");
    for (const VerifyCheck& c : checks) {
        w.begin_elem_obj();
        w.str("name", c.name);
        w.boolean("pass", c.pass);
        w.num("measured", c.measured);
        w.num("expected", c.expected);
        w.end_obj();
    }
    w.end_arr();
    const std::string payload = w.end() + "\n";
    if (!o.out.empty()) {
        const int rc = write_payload(o, payload);
        if (rc != 0) return rc;
        std::fwrite(lines.data(), 1, lines.size(), stdout);
    } else {
        std::fwrite(lines.data(), 1, lines.size(), stdout);
        std::fwrite(payload.data(), 1, payload.size(), stdout);
    }
    return all ? 0 : 3;
}

int run_sweep(const Options& o) {
    if (o.count < 1 || o.count > 100000 || !std::isfinite(o.lo) || !std::isfinite(o.hi) ||
        !(o.lo <= o.hi)) {
        std::cerr << "error: sweep needs 1 <= count <= 100000 and finite lo <= hi\n";
        return 2;
    }
    const int count = o.count;
    auto at = [&](int i) {
        return count == 1 ? o.lo : o.lo + (o.hi - o.lo) * double(i) / double(count - 1);
    };

    std::string header;
    std::vector<std::string> rows(count);
    Params base = params_for(o);

    if (o.target == "condition") {
        header = "k,lhs_at_k,rhs,admissible,status,reason\n";
        const double a_p = compute_ap(base, grid_for(o));
        auto fill = [&](int begin, int end) {
            for (int i = begin; i < end; ++i) {
                const double k = at(i);
                Params P = base;
                P.k = k;
                try {
                    ConditionReport rep = check_condition(P, a_p);
                    rows[i] = format_double_csv(k) + "," + format_double_csv(rep.lhs_at_k) +
                              "," + format_double_csv(rep.rhs) + "," +
                              (rep.admissible ? "true" : "false") + ",ok,\n";
                } catch (const Error& e) {
                    rows[i] = format_double_csv(k) + ",,,,error," + e.code() + "\n";
                }
            }
        };
        const int T = std::max(1, std::min<int>(std::thread::hardware_concurrency(), count));
        if (T <= 1) {
            fill(0, count);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < T; ++t)
                pool.emplace_back(fill, count * t / T, count * (t + 1) / T);
            for (auto& th : pool) th.join();
        }
    } else {  // branch-f
        header = "lambda,m_theta,F,status,reason\n";
        GridPtr g = grid_for(o);
        const double tol = tol_or(o, 1e-10);
        const int iters = iters_or(o, 400);
        auto fill = [&](int begin, int end) {
            for (int i = begin; i < end; ++i) {
                const double lam = at(i);
                try {
                    SolveReport rep = absorption_solve(base, lam, g, tol, iters);
                    const double F = 1.0 / (-rep.m_theta) - lam;
                    rows[i] = format_double_csv(lam) + "," + format_double_csv(rep.m_theta) +
                              "," + format_double_csv(F) + ",ok,\n";
                } catch (const Error& e) {
                    rows[i] = format_double_csv(lam) + ",,,error," + e.code() + "\n";
                }
            }
        };
        const int T = std::max(1, std::min<int>(std::thread::hardware_concurrency(), count));
        if (T <= 1) {
            fill(0, count);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < T; ++t)
                pool.emplace_back(fill, count * t / T, count * (t + 1) / T);
            for (auto& th : pool) th.join();
        }
    }

    std::string payload = header;
    for (const std::string& r : rows) payload += r;
    return write_payload(o, payload);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    Options o;

    std::string err;
    if (auto cfg = scan_config_path(argc, argv, err)) {
        if (!apply_config(*cfg, o, err)) {
            std::cerr << "error: " << err << "\n";
            return 1;
        }
    } else if (!err.empty()) {
        std::cerr << "error: " << err << "\n";
        return 1;
    }

    CLI::App app{"isolated singular solutions of the Kirchhoff Dirichlet problem"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* c) {
        c->add_option("--N", o.N, "space dimension");
        c->add_option("--p", o.p, "nonlinearity exponent");
        c->add_option("--theta", o.theta, "Kirchhoff offset");
        c->add_option("--k", o.k, "Dirac mass");
        c->add_option("--rmin", o.rmin, "innermost grid radius");
        c->add_option("--nodes", o.nodes, "grid size");
        c->add_option("--tol", o.tol, "solver tolerance");
        c->add_option("--out", o.out, "write the report here instead of stdout");
        c->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--config", o.config, "JSON config file (flags override it)");
    };

    CLI::App* constants = app.add_subcommand("constants", "derived scalar constants");
    add_common(constants);
    CLI::App* condition = app.add_subcommand("condition", "smallness condition in k");
    add_common(condition);
    CLI::App* weak = app.add_subcommand("weak-solve", "Dirac-data fixed point");
    add_common(weak);
    weak->add_option("--max-iter", o.max_iter);
    weak->add_flag("--from-barrier-top", o.from_barrier_top,
                   "start the iteration at the barrier instead of 0");
    CLI::App* absorb = app.add_subcommand("absorption-solve", "-Δu + λu^p = kδ0");
    add_common(absorb);
    absorb->add_option("--lambda", o.lambda);
    absorb->add_option("--max-iter", o.max_iter);
    CLI::App* negb = app.add_subcommand("neg-branch", "negative-mass branch root");
    add_common(negb);
    CLI::App* strong = app.add_subcommand("strong-profile", "strongly singular profile");
    add_common(strong);
    strong->add_option("--regime", o.regime)
        ->required()
        ->check(CLI::IsMember({"absorption", "source"}));
    CLI::App* super = app.add_subcommand("super-branch", "profile + scalar branch, composed");
    add_common(super);
    super->add_option("--regime", o.regime)
        ->required()
        ->check(CLI::IsMember({"absorption", "source"}));
    CLI::App* boot = app.add_subcommand("bootstrap", "integrability exponent ledgers");
    add_common(boot);
    CLI::App* verify = app.add_subcommand("verify", "pinned self-checks");
    add_common(verify);
    verify->add_option("--suite", o.suite)->check(CLI::IsMember({"closed-forms"}));
    CLI::App* sweep = app.add_subcommand("sweep", "CSV table over one swept variable");
    add_common(sweep);
    sweep->add_option("--lambda", o.lambda);
    sweep->add_option("--target", o.target)
        ->required()
        ->check(CLI::IsMember({"condition", "branch-f"}));
    sweep->add_option("--lo", o.lo);
    sweep->add_option("--hi", o.hi);
    sweep->add_option("--count", o.count);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (!resolve_nodes(o, err)) {
        std::cerr << "error: " << err << "\n";
        return 1;
    }

    const bool profile_cmd = app.got_subcommand(weak) || app.got_subcommand(absorb) ||
                             app.got_subcommand(strong) || app.got_subcommand(super);
    if (o.format == "csv" && !profile_cmd && !app.got_subcommand(sweep)) {
        std::cerr << "error: --format csv applies to profile subcommands and sweep only\n";
        return 1;
    }

    try {
        if (app.got_subcommand(constants)) return run_constants(o);
        if (app.got_subcommand(condition)) return run_condition(o);
        if (app.got_subcommand(weak)) return run_weak_solve(o);
        if (app.got_subcommand(absorb)) return run_absorption_solve(o);
        if (app.got_subcommand(negb)) return run_neg_branch(o);
        if (app.got_subcommand(strong)) return run_strong_profile(o);
        if (app.got_subcommand(super)) return run_super_branch(o);
        if (app.got_subcommand(boot)) return run_bootstrap(o);
        if (app.got_subcommand(verify)) return run_verify(o);
        if (app.got_subcommand(sweep)) return run_sweep(o);
    } catch (const Error& e) {
        std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
        write_failure_report(o, e);
        return exit_code_for(e);
    }
    return 1;
}

}  // namespace ksing
