#pragma once

#include <string>
#include <vector>

#include "beltree/tree.hpp"

namespace beltree {

/// Frozen prior state of one node, carried across adjustment stages so that
/// bearings can be computed against the original basis.
struct DiagnosticSnapshot {
    std::string node;
    Vector prior_expectation;
    Matrix prior_factor;          // lower-triangular A with V = A A^T
    Matrix cumulative_transform;  // starts at zero
};

struct DiagnosticReport {
    Vector bearing_coordinates;
    double size = 0.0;
    double expected_size = 0.0;
    double size_ratio = 0.0;
};

enum class DiagnosticLevel { low, expected, warning };

/// Records E, the factor of V and a zero cumulative transform for `node`.
DiagnosticSnapshot open_snapshot(const BeliefTree& tree, const std::string& node);

/// Bearing coordinates A^+ (E' - E) against the snapshot basis, with
/// size = ||coords||^2, expected size = trace of the cumulative transform, and
/// their ratio.
DiagnosticReport bearing(const DiagnosticSnapshot& snapshot, const BeliefTree& tree_after);

/// Folds one stage's partial transform into the cumulative transform.
DiagnosticSnapshot advance_snapshot(DiagnosticSnapshot snapshot,
                                    const Matrix& partial_transform);

/// warning above 3, low below 1/3, expected in between. The lower band is a
/// symmetric extension of the usual "bigger than 3" rule.
DiagnosticLevel flag_size_ratio(const DiagnosticReport& report);

std::string to_string(DiagnosticLevel level);

struct DiagnosticRow {
    std::string stage;
    DiagnosticReport report;
    DiagnosticLevel level = DiagnosticLevel::expected;
};

/// Plain-text table used by the CLI; `significant` controls rounding.
std::string render_diagnostic_table(const std::vector<DiagnosticRow>& rows, int significant);

}  // namespace beltree
