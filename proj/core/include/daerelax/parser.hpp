// daerelax: combinatorial-relaxation preprocessing for nonlinear DAEs.
// SPDX-License-Identifier: MIT

#ifndef DAERELAX_PARSER_HPP
#define DAERELAX_PARSER_HPP

#include <daerelax/dae_system.hpp>

#include <string>

namespace daerelax {

/// Text format:
///   param <name> = <number>;
///   var <id>, <id>, ...;
///   aux <id>, ...;                      (variables born from augmentation)
///   point { t = <num>; <id><primes> = <num>; ... }
///   eq <expr> = <expr>;                 (stored as lhs - rhs = 0)
/// Expressions use + - * / ^, sin cos tan exp log tanh sqrt, t, pi,
/// postfix primes for derivatives and der(<id>, <k>) as canonical form.
/// parse -> serialize -> parse is a fixed point (structural equality).
DaeSystem parse_dae(const std::string& text);

std::string serialize_dae(const DaeSystem& sys);

/// trajectory { x1 = sin(t) + 1; ...; grid = 0:0.1:1; }
TrajectoryFixture parse_trajectory(const std::string& text);

bool systems_structurally_equal(const DaeSystem& a, const DaeSystem& b);

} // namespace daerelax

#endif
