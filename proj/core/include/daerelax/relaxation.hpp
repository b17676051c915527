// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_RELAXATION_HPP
#define DAERELAX_RELAXATION_HPP

#include <daerelax/augmentation.hpp>
#include <daerelax/substitution.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace daerelax {

enum class Method { Substitution, Augmentation, LinearCombination, Auto };

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

enum class FinalStatus {
    Ok,
    NoPerfectMatching,
    PointSingularCandidate,
    MethodFailure,
};

const char* final_status_name(FinalStatus s);

/// A user-supplied (p, q, r, I, J) selection; the solvability of the
/// modification methods depends on it, so full overrides are accepted and
/// validated. Applied to the first iteration only.
struct ManualSelection {
    std::optional<std::vector<long>> p;
    std::optional<std::vector<long>> q;
    std::optional<std::size_t> r;
    std::vector<std::size_t> rows_I;
    std::vector<std::size_t> cols_J;

    bool has_pivot() const { return r.has_value(); }
    bool has_dual() const { return p.has_value() || q.has_value(); }
};

struct RelaxationOptions {
    Method method = Method::Auto;
    /// <= 0 selects the default budget delta_hat(F) + 1.
    int max_iterations = 0;
    ZeroTestConfig zero_test;
    std::optional<Point> base_point; // overrides the system's own point
    bool dynamic_pivoting = false;
    ManualSelection manual;
    std::map<std::string, double> xi; // explicit frozen constants
};

struct IterationRecord {
    SignatureMatrix sig;
    DualSolution dual;
    int structural_rank = 0;
    FailureClass verdict = FailureClass::Ok;
    std::string method_used;
    std::optional<PivotChoice> pivot;
    std::optional<SubstitutionStep> sub_step; // substitution or LC
    std::optional<AugmentationStep> aug_step;
};

struct ModificationReport {
    std::vector<IterationRecord> iterations;
    std::optional<DaeSystem> final_system;
    FinalStatus status = FinalStatus::Ok;
    std::string failure_message;
    std::optional<long> final_delta;
    std::optional<double> final_determinant; // at the base point, if any

    std::size_t modification_count() const {
        std::size_t k = 0;
        for (const auto& it : iterations)
            if (it.sub_step || it.aug_step) ++k;
        return k;
    }
};

/// The three-phase loop: dual offsets; Jacobian rank verdict; modification.
/// Auto mode tries the substitution method and falls back to augmentation
/// when the reduced system cannot be solved symbolically.
ModificationReport relax(const DaeSystem& sys, const RelaxationOptions& opts);

struct EquivalenceReport {
    double max_residual_before = 0;
    double max_residual_after = 0;
    double threshold = 1e-8;
    bool pass = false;
};

/// Residual check of both systems along a trajectory fixture; when `after`
/// carries extra auxiliary variables, their trajectories are recovered from
/// the appended equations first.
EquivalenceReport verify_equivalence(const DaeSystem& before,
                                     const DaeSystem& after,
                                     const TrajectoryFixture& fix,
                                     const ZeroTestConfig& cfg,
                                     double threshold = 1e-8);

} // namespace daerelax

#endif
