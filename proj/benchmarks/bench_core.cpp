// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/calculus.hpp>
#include <daerelax/parser.hpp>
#include <daerelax/relaxation.hpp>

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

namespace {

using namespace daerelax;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

DaeSystem instance(const char* name) {
    return parse_dae(slurp(std::string(DAERELAX_INSTANCE_DIR) + "/" + name));
}

void BM_parse_ringmod(benchmark::State& state) {
    std::string text = slurp(std::string(DAERELAX_INSTANCE_DIR) + "/ringmod.dae");
    for (auto _ : state) benchmark::DoNotOptimize(parse_dae(text));
}
BENCHMARK(BM_parse_ringmod);

void BM_signature_transamp(benchmark::State& state) {
    DaeSystem sys = instance("transamp.dae");
    ZeroTestConfig cfg = sys.analysis_config({});
    for (auto _ : state) benchmark::DoNotOptimize(signature(sys, cfg));
}
BENCHMARK(BM_signature_transamp);

void BM_assignment_ringmod(benchmark::State& state) {
    DaeSystem sys = instance("ringmod.dae");
    ZeroTestConfig cfg = sys.analysis_config({});
    SignatureMatrix sig = signature(sys, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(sig));
}
BENCHMARK(BM_assignment_ringmod);

void BM_jacobian_rank_transamp(benchmark::State& state) {
    DaeSystem sys = instance("transamp.dae");
    ZeroTestConfig cfg = sys.analysis_config({});
    DualSolution dual = solve_assignment(signature(sys, cfg));
    for (auto _ : state) {
        SystemJacobian jac = system_jacobian(sys, dual, cfg);
        benchmark::DoNotOptimize(structural_rank(jac, cfg));
    }
}
BENCHMARK(BM_jacobian_rank_transamp);

void BM_simplify_quartic_cancel(benchmark::State& state) {
    DaeSystem sys = instance("lcfail.dae");
    Expr f2 = sys.equation(1);
    SubstMap phi{{VarSlot::of_var("x1", 1),
                  Expr::num(2) *
                      Expr::pow(Expr::call(Func::Cos, Expr::time()),
                                Rational(2)) /
                      Expr::var("x2", 1)}};
    Expr raw = substitute(f2, phi);
    for (auto _ : state) benchmark::DoNotOptimize(simplify(raw));
}
BENCHMARK(BM_simplify_quartic_cancel);

void BM_relax_transamp_substitution(benchmark::State& state) {
    DaeSystem sys = instance("transamp.dae");
    RelaxationOptions opts;
    opts.method = Method::Substitution;
    for (auto _ : state) benchmark::DoNotOptimize(relax(sys, opts));
}
BENCHMARK(BM_relax_transamp_substitution);

} // namespace

BENCHMARK_MAIN();
