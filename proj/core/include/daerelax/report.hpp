// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_REPORT_HPP
#define DAERELAX_REPORT_HPP

#include <daerelax/relaxation.hpp>

#include <optional>
#include <string>

namespace daerelax {

/// Machine-readable run report (schema-versioned JSON, full-precision
/// numbers, deterministic under a fixed seed).
std::string report_to_json(const ModificationReport& report,
                           const RelaxationOptions& opts,
                           const std::optional<EquivalenceReport>& residuals =
                               std::nullopt);

/// Analysis-only report (signature, dual offsets, Jacobian pattern, failure
/// class) for one system.
std::string analysis_to_json(const DaeSystem& sys, const SignatureMatrix& sig,
                             const DualSolution& dual,
                             const SystemJacobian& jac, FailureClass verdict,
                             const ZeroTestConfig& cfg);

} // namespace daerelax

#endif
