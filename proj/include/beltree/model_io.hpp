#pragma once

#include <filesystem>
#include <string>

#include "beltree/tree.hpp"

namespace beltree {

/// Parses the model file format:
///
///   nodes:
///     node X1
///       labels X1
///       expectation 20
///       variance 571
///   arcs:
///     arc X1 -> theta1
///       covariance 400 0
///
/// Repeated `variance` / `covariance` lines stack matrix rows; covariance rows
/// index the `from` node's quantities. An optional `builders:` section holds
/// `builder dlm ...` / `builder nstep ...` parameter sets that are expanded
/// before any explicit nodes are added.
BeliefTree parse_model(const std::string& text);

BeliefTree load_model(const std::filesystem::path& path);

/// Writes nodes, observed flags and arcs with 12 significant digits; parsing
/// the output reproduces all moments at that precision.
std::string serialize_model(const BeliefTree& tree);

void save_model(const BeliefTree& tree, const std::filesystem::path& path);

/// "[a b; c d]" or "a b; c d": rows split on ';', entries on whitespace/','.
Matrix parse_matrix_literal(const std::string& text);

/// Single-row or single-column matrix literal as a vector.
Vector parse_vector_literal(const std::string& text);

}  // namespace beltree
