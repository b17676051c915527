// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_ERRORS_HPP
#define DAERELAX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace daerelax {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Evaluation hit an undefined operation (division by zero, log of a
/// nonpositive value, nonfinite intermediate, missing binding).
struct EvalDomainError : Error {
    using Error::Error;
};

/// 100 consecutive random samples hit undefined evaluations.
struct SampleDomainError : Error {
    using Error::Error;
};

/// Constructing a quotient whose denominator the zero test accepts as zero.
struct DivisionByZeroExprError : Error {
    using Error::Error;
};

struct IndexOutOfRangeError : Error {
    using Error::Error;
};

struct NonSquareSystemError : Error {
    using Error::Error;
};

struct MissingClosedFormError : Error {
    using Error::Error;
};

/// A reduced equation system is not affine in the elimination targets.
struct NonlinearTargetsError : Error {
    using Error::Error;
};

/// The coefficient matrix of a symbolic linear solve failed the
/// nonsingularity zero test.
struct SingularAtConstructionError : Error {
    using Error::Error;
};

/// The linear-combination rewrite is invalid: some combination coefficient
/// depends on a derivative of order >= q_j - p_r.
struct LCConditionError : Error {
    using Error::Error;
};

/// Probabilistic zero tests contradicted each other across reseeded retries
/// of the column elimination.
struct DegenerateEliminationError : Error {
    using Error::Error;
};

struct MissingXiValueError : Error {
    using Error::Error;
};

/// The frozen-constant image of the pivot block is singular.
struct XiSingularError : Error {
    using Error::Error;
};

/// An internal guarantee of a modification step failed its runtime check.
struct PostconditionViolationError : Error {
    using Error::Error;
};

/// The relaxation loop exceeded its iteration budget.
struct IterationBudgetExceededError : Error {
    using Error::Error;
};

/// A user-supplied (p, q, r, I, J) selection failed validation.
struct InvalidSelectionError : Error {
    using Error::Error;
};

/// Parse diagnostics carry a 1-based source position.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " at line " + std::to_string(line_) + ", column " +
                std::to_string(col_)),
          line(line_), column(col_) {}
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct UnknownSymbolError : ParseError {
    using ParseError::ParseError;
};

} // namespace daerelax

#endif
