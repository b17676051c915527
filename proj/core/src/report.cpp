// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#include <daerelax/report.hpp>

#include <daerelax/parser.hpp>

#include <json.hpp>

namespace daerelax {

namespace {

using nlohmann::json;

json signature_json(const SignatureMatrix& sig) {
    json rows = json::array();
    for (std::size_t i = 0; i < sig.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < sig.cols; ++j) {
            if (sig.at(i, j))
                row.push_back(*sig.at(i, j));
            else
                row.push_back(nullptr);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json indices_1based(const std::vector<std::size_t>& v) {
    json a = json::array();
    for (std::size_t i : v) a.push_back(i + 1);
    return a;
}

json pivot_json(const PivotChoice& p) {
    return json{{"r", p.r + 1},
                {"I", indices_1based(p.rows_I)},
                {"J", indices_1based(p.cols_J)},
                {"kappa", p.kappa},
                {"targets_affine", p.targets_affine}};
}

std::string slot_name(const VarSlot& s) {
    if (s.aux || s.order == 0) return s.name;
    if (s.order <= 3) return s.name + std::string(s.order, '\'');
    return "der(" + s.name + ", " + std::to_string(s.order) + ")";
}

json dual_json(const DualSolution& d) {
    json j{{"p", d.p}, {"q", d.q}, {"optimal", d.optimal}};
    if (d.delta_hat)
        j["delta_hat"] = *d.delta_hat;
    else
        j["delta_hat"] = nullptr;
    if (d.matching)
        j["matching"] = indices_1based(*d.matching);
    return j;
}

json residuals_json(const EquivalenceReport& r) {
    return json{{"max_residual_before", r.max_residual_before},
                {"max_residual_after", r.max_residual_after},
                {"threshold", r.threshold},
                {"pass", r.pass}};
}

} // namespace

std::string report_to_json(const ModificationReport& report,
                           const RelaxationOptions& opts,
                           const std::optional<EquivalenceReport>& residuals) {
    json j;
    j["schema_version"] = 1;
    j["tool"] = "daerelax";
    j["method"] = method_name(opts.method);
    j["seed"] = opts.zero_test.seed;
    json iters = json::array();
    for (const IterationRecord& it : report.iterations) {
        json rec;
        rec["signature"] = signature_json(it.sig);
        rec["dual"] = dual_json(it.dual);
        rec["structural_rank"] = it.structural_rank;
        rec["verdict"] = failure_name(it.verdict);
        if (it.pivot) rec["pivot"] = pivot_json(*it.pivot);
        if (!it.method_used.empty()) rec["method"] = it.method_used;
        if (it.sub_step) {
            json solved = json::object();
            for (const auto& [slot, e] : it.sub_step->explicit_map)
                solved[slot_name(slot)] = e.to_string();
            rec["solved_targets"] = solved;
            rec["new_equation"] = it.sub_step->new_fr.to_string();
            if (it.sub_step->delta_after)
                rec["delta_after"] = *it.sub_step->delta_after;
            if (it.sub_step->lc_coefficients) {
                json u = json::array();
                for (const Expr& c : *it.sub_step->lc_coefficients)
                    u.push_back(c.to_string());
                rec["lc_coefficients"] = u;
            }
        }
        if (it.aug_step) {
            json xi = json::object();
            for (const auto& [slot, v] : it.aug_step->xi)
                xi[slot_name(slot)] = v;
            rec["xi"] = xi;
            rec["new_aux"] = it.aug_step->new_aux;
            if (it.aug_step->delta_after)
                rec["delta_after"] = *it.aug_step->delta_after;
        }
        iters.push_back(std::move(rec));
    }
    j["iterations"] = std::move(iters);
    j["final_status"] = final_status_name(report.status);
    if (!report.failure_message.empty())
        j["failure_message"] = report.failure_message;
    if (report.final_delta)
        j["final_delta_hat"] = *report.final_delta;
    if (report.final_determinant)
        j["final_determinant"] = *report.final_determinant;
    if (report.final_system)
        j["final_system"] = serialize_dae(*report.final_system);
    if (residuals) j["residual_check"] = residuals_json(*residuals);
    return j.dump(2) + "\n";
}

std::string analysis_to_json(const DaeSystem& sys, const SignatureMatrix& sig,
                             const DualSolution& dual,
                             const SystemJacobian& jac, FailureClass verdict,
                             const ZeroTestConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["tool"] = "daerelax";
    j["seed"] = cfg.seed;
    j["size"] = sys.equation_count();
    j["order"] = sys.order();
    json cols = json::array();
    for (const Column& c : sys.columns())
        cols.push_back(json{{"name", c.name}, {"aux", c.aux}});
    j["columns"] = cols;
    j["signature"] = signature_json(sig);
    j["dual"] = dual_json(dual);
    json pattern = json::array();
    json entries = json::array();
    for (std::size_t i = 0; i < jac.rows(); ++i) {
        json prow = json::array();
        json erow = json::array();
        for (std::size_t jj = 0; jj < jac.cols(); ++jj) {
            prow.push_back(jac.pattern[i][jj]);
            erow.push_back(jac.entries[i][jj].to_string());
        }
        pattern.push_back(std::move(prow));
        entries.push_back(std::move(erow));
    }
    j["jacobian_pattern"] = pattern;
    j["jacobian"] = entries;
    j["failure_class"] = failure_name(verdict);
    return j.dump(2) + "\n";
}

} // namespace daerelax
