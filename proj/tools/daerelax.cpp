// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/errors.hpp>
#include <daerelax/parser.hpp>
#include <daerelax/relaxation.hpp>
#include <daerelax/report.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace daerelax;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStructuralFailure = 2;
constexpr int kExitMethodFailure = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

DaeSystem load_system(const std::string& path) {
    DaeSystem sys = parse_dae(read_file(path));
    if (!sys.square())
        std::cerr << "warning: " << path << " is not square ("
                  << sys.equation_count() << " equations, "
                  << sys.column_count() << " columns); analysis subcommands "
                  << "will reject it\n";
    return sys;
}

struct ZeroTestFlags {
    std::uint64_t seed = ZeroTestConfig{}.seed;
    int samples = ZeroTestConfig{}.samples;
    double tol_zero = ZeroTestConfig{}.abs_tol;
    double box = ZeroTestConfig{}.box_radius;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed for the zero test");
        cmd->add_option("--samples", samples, "zero-test sample count");
        cmd->add_option("--tol-zero", tol_zero, "zero-test absolute tolerance");
        cmd->add_option("--box", box, "zero-test sampling box radius");
    }

    ZeroTestConfig config() const {
        ZeroTestConfig cfg;
        cfg.seed = seed;
        cfg.samples = samples;
        cfg.abs_tol = tol_zero;
        cfg.box_radius = box;
        return cfg;
    }
};

/// --pivot r=5,I=3,4,6,J=3,4,5[,p=...,q=...]; bare numbers extend the most
/// recent key, indices are 1-based.
ManualSelection parse_selection(const std::string& text) {
    ManualSelection sel;
    std::vector<long>* current = nullptr;
    std::vector<long> r_list, i_list, j_list, p_list, q_list;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto eq = tok.find('=');
        std::string value = tok;
        if (eq != std::string::npos) {
            std::string key = tok.substr(0, eq);
            value = tok.substr(eq + 1);
            if (key == "r") current = &r_list;
            else if (key == "I") current = &i_list;
            else if (key == "J") current = &j_list;
            else if (key == "p") current = &p_list;
            else if (key == "q") current = &q_list;
            else throw Error("unknown pivot key '" + key + "'");
        }
        if (!current) throw Error("pivot values must follow a key");
        if (value.empty()) continue;
        current->push_back(std::stol(value));
    }
    if (r_list.size() > 1) throw Error("pivot r must be a single index");
    if (!r_list.empty()) sel.r = static_cast<std::size_t>(r_list[0] - 1);
    for (long v : i_list) sel.rows_I.push_back(static_cast<std::size_t>(v - 1));
    for (long v : j_list) sel.cols_J.push_back(static_cast<std::size_t>(v - 1));
    if (!p_list.empty()) sel.p = p_list;
    if (!q_list.empty()) sel.q = q_list;
    if ((sel.rows_I.size() || sel.cols_J.size()) && !sel.r)
        throw Error("pivot I/J need r as well");
    return sel;
}

std::map<std::string, double> parse_xi(const std::string& text) {
    std::map<std::string, double> xi;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw Error("xi entries look like name=value");
        xi[tok.substr(0, eq)] = std::stod(tok.substr(eq + 1));
    }
    return xi;
}

void print_signature(std::ostream& os, const SignatureMatrix& sig) {
    for (std::size_t i = 0; i < sig.rows; ++i) {
        os << "  [";
        for (std::size_t j = 0; j < sig.cols; ++j) {
            if (j) os << ' ';
            if (sig.at(i, j))
                os << *sig.at(i, j);
            else
                os << '-';
        }
        os << "]\n";
    }
}

void print_vector(std::ostream& os, const char* name,
                  const std::vector<long>& v) {
    os << name << " = (";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ")\n";
}

int run_analyze(const std::string& path, const ZeroTestFlags& flags,
                const std::string& json_out) {
    DaeSystem sys = load_system(path);
    sys.require_square();
    ZeroTestConfig cfg = sys.analysis_config(flags.config());
    SignatureMatrix sig = signature(sys, cfg);
    DualSolution dual = solve_assignment(sig);
    FailureClass verdict = FailureClass::NoPerfectMatching;
    SystemJacobian jac;
    if (dual.delta_hat) {
        jac = system_jacobian(sys, dual, cfg);
        verdict = classify_failure(sys, dual, jac, cfg);
    }
    std::cout << "system: " << sys.equation_count() << " equations, order "
              << sys.order() << "\n";
    std::cout << "signature matrix ('-' marks no dependence):\n";
    print_signature(std::cout, sig);
    if (dual.delta_hat) {
        print_vector(std::cout, "p", dual.p);
        print_vector(std::cout, "q", dual.q);
        std::cout << "delta_hat = " << *dual.delta_hat << "\n";
        std::cout << "jacobian pattern:\n";
        for (std::size_t i = 0; i < jac.rows(); ++i) {
            std::cout << "  [";
            for (std::size_t j = 0; j < jac.cols(); ++j)
                std::cout << (jac.pattern[i][j] ? 'x' : '.');
            std::cout << "]\n";
        }
    } else {
        std::cout << "delta_hat = -infinity (no perfect matching)\n";
    }
    std::cout << "failure class: " << failure_name(verdict) << "\n";
    if (!json_out.empty())
        write_file(json_out,
                   analysis_to_json(sys, sig, dual, jac, verdict, cfg));
    return verdict == FailureClass::NoPerfectMatching ? kExitStructuralFailure
                                                      : kExitOk;
}

int run_modify(const std::string& path, const std::string& method_str,
               const ZeroTestFlags& flags, const std::string& pivot_str,
               const std::string& xi_str, int max_iters, bool dynamic,
               const std::string& out_json, const std::string& emit_path) {
    DaeSystem sys = load_system(path);
    RelaxationOptions opts;
    auto method = method_from_name(method_str);
    if (!method) throw Error("unknown method '" + method_str + "'");
    opts.method = *method;
    opts.zero_test = flags.config();
    opts.max_iterations = max_iters;
    opts.dynamic_pivoting = dynamic;
    if (!pivot_str.empty()) opts.manual = parse_selection(pivot_str);
    if (!xi_str.empty()) opts.xi = parse_xi(xi_str);

    ModificationReport report = relax(sys, opts);
    std::cout << "final status: " << final_status_name(report.status) << "\n";
    std::cout << "iterations: " << report.iterations.size()
              << " (modifications: " << report.modification_count() << ")\n";
    for (const IterationRecord& it : report.iterations) {
        std::cout << "  delta_hat = ";
        if (it.dual.delta_hat)
            std::cout << *it.dual.delta_hat;
        else
            std::cout << "-infinity";
        std::cout << ", rank " << it.structural_rank;
        if (it.pivot) {
            std::cout << ", pivot r=" << it.pivot->r + 1 << " I={";
            for (std::size_t k = 0; k < it.pivot->rows_I.size(); ++k)
                std::cout << (k ? "," : "") << it.pivot->rows_I[k] + 1;
            std::cout << "} J={";
            for (std::size_t k = 0; k < it.pivot->cols_J.size(); ++k)
                std::cout << (k ? "," : "") << it.pivot->cols_J[k] + 1;
            std::cout << "}";
        }
        if (!it.method_used.empty()) std::cout << " via " << it.method_used;
        std::cout << "\n";
    }
    if (!report.failure_message.empty())
        std::cout << "failure: " << report.failure_message << "\n";
    if (!out_json.empty())
        write_file(out_json, report_to_json(report, opts));
    if (!emit_path.empty() && report.final_system)
        write_file(emit_path, serialize_dae(*report.final_system));
    switch (report.status) {
    case FinalStatus::Ok:
    case FinalStatus::PointSingularCandidate:
        return kExitOk;
    case FinalStatus::NoPerfectMatching:
        return kExitStructuralFailure;
    case FinalStatus::MethodFailure:
        return kExitMethodFailure;
    }
    return kExitOk;
}

int run_check(const std::string& path, const std::string& against,
              const std::string& trajectory, double threshold,
              const ZeroTestFlags& flags) {
    DaeSystem before = load_system(path);
    DaeSystem after = load_system(against);
    TrajectoryFixture fix = parse_trajectory(read_file(trajectory));
    EquivalenceReport rep = verify_equivalence(
        before, after, fix, before.analysis_config(flags.config()), threshold);
    std::cout << "max |residual| of " << path << ": "
              << rep.max_residual_before << "\n";
    std::cout << "max |residual| of " << against << ": "
              << rep.max_residual_after << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << " (threshold "
              << rep.threshold << ")\n";
    return rep.pass ? kExitOk : kExitMethodFailure;
}

int run_bench(const std::string& dir, const std::string& method_str,
              const ZeroTestFlags& flags) {
    struct Instance {
        const char* file;
        const char* name;
    };
    const Instance instances[] = {
        {"pendulum.dae", "nonlinearly modified pendulum"},
        {"robotarm.dae", "robotic arm"},
        {"transamp.dae", "transistor amplifier"},
        {"ringmod.dae", "ring modulator"},
    };
    auto method = method_from_name(method_str);
    if (!method) throw Error("unknown method '" + method_str + "'");
    bool all_ok = true;
    for (const Instance& inst : instances) {
        std::string path = dir + "/" + inst.file;
        RelaxationOptions opts;
        opts.method = *method;
        opts.zero_test = flags.config();
        auto t0 = std::chrono::steady_clock::now();
        ModificationReport report = relax(load_system(path), opts);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        bool ok = report.status == FinalStatus::Ok;
        all_ok = all_ok && ok;
        std::cout << (ok ? "OK  " : "FAIL") << " " << inst.name << ": "
                  << report.modification_count() << " modification(s)";
        if (report.final_delta)
            std::cout << ", final delta_hat " << *report.final_delta;
        if (report.final_system)
            std::cout << ", final size " << report.final_system->equation_count();
        std::cout << ", " << ms << " ms\n";
    }
    return all_ok ? kExitOk : kExitMethodFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"structural analysis and repair of nonlinear DAEs via "
                 "combinatorial relaxation"};
    app.require_subcommand(1);

    std::string file, json_out, method = "auto", pivot_str, xi_str;
    std::string against, trajectory, emit_path;
    std::string bench_dir = DAERELAX_INSTANCE_DIR;
    double threshold = 1e-8;
    int max_iters = 0;
    bool dynamic = false;
    ZeroTestFlags flags;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "signature matrix, dual offsets, Jacobian, failure class");
    analyze->add_option("file", file)->required();
    analyze->add_option("--json", json_out, "write a JSON report");
    flags.attach(analyze);

    CLI::App* modify = app.add_subcommand(
        "modify", "run the combinatorial-relaxation modification loop");
    modify->add_option("file", file)->required();
    modify->add_option("--method", method,
                       "sub|aug|lc|auto (long names accepted)");
    modify->add_option("--pivot", pivot_str,
                       "manual selection r=..,I=..,J=..[,p=..,q=..] (1-based)");
    modify->add_option("--xi", xi_str, "frozen constants, name=value[,...]");
    modify->add_option("--max-iters", max_iters, "iteration budget");
    modify->add_flag("--dynamic-pivoting", dynamic,
                     "re-choose J for the best-conditioned block at the base "
                     "point");
    modify->add_option("--out", json_out, "write the JSON report here");
    modify->add_option("--emit", emit_path, "write the modified system here");
    flags.attach(modify);

    CLI::App* check = app.add_subcommand(
        "check", "residual-equivalence check of two systems on a trajectory");
    check->add_option("file", file)->required();
    check->add_option("--against", against)->required();
    check->add_option("--trajectory", trajectory)->required();
    check->add_option("--threshold", threshold);
    flags.attach(check);

    CLI::App* bench = app.add_subcommand(
        "bench", "run the four benchmark instances end to end");
    bench->add_option("--dir", bench_dir, "instance directory");
    bench->add_option("--method", method, "modification method (default aug)");
    flags.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (app.got_subcommand(analyze))
            return run_analyze(file, flags, json_out);
        if (app.got_subcommand(modify))
            return run_modify(file, method, flags, pivot_str, xi_str, max_iters,
                              dynamic, json_out, emit_path);
        if (app.got_subcommand(check))
            return run_check(file, against, trajectory, threshold, flags);
        if (app.got_subcommand(bench)) {
            if (!bench->count("--method")) method = "aug";
            return run_bench(bench_dir, method, flags);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
