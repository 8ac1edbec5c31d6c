#include "beltree/diagnostics.hpp"

#include <iomanip>
#include <sstream>

#include "beltree/format.hpp"

namespace beltree {

namespace {
constexpr double kTiny = 1e-12;
}

DiagnosticSnapshot open_snapshot(const BeliefTree& tree, const std::string& node) {
    const BeliefTree::Node& n = tree.node(node);
    DiagnosticSnapshot snap;
    snap.node = node;
    snap.prior_expectation = n.spec.expectation;
    snap.prior_factor = psd_factor(n.spec.variance);
    snap.cumulative_transform = Matrix::Zero(n.spec.dim(), n.spec.dim());
    return snap;
}

DiagnosticReport bearing(const DiagnosticSnapshot& snapshot, const BeliefTree& tree_after) {
    const BeliefTree::Node& n = tree_after.node(snapshot.node);
    if (n.spec.dim() != snapshot.prior_expectation.size()) {
        throw ShapeError("node '" + snapshot.node +
                         "' changed dimension since the snapshot was taken");
    }
    DiagnosticReport report;
    report.bearing_coordinates = pseudo_inverse(snapshot.prior_factor) *
                                 (n.spec.expectation - snapshot.prior_expectation);
    report.size = report.bearing_coordinates.squaredNorm();
    report.expected_size = snapshot.cumulative_transform.trace();
    if (report.expected_size <= kTiny) {
        if (report.size > kTiny) {
            throw DegenerateRatioError("expected size is zero but observed size is " +
                                       std::to_string(report.size));
        }
        report.size_ratio = 0.0;
    } else {
        report.size_ratio = report.size / report.expected_size;
    }
    return report;
}

DiagnosticSnapshot advance_snapshot(DiagnosticSnapshot snapshot,
                                    const Matrix& partial_transform) {
    snapshot.cumulative_transform =
        accumulate_transform(snapshot.cumulative_transform, partial_transform);
    return snapshot;
}

DiagnosticLevel flag_size_ratio(const DiagnosticReport& report) {
    if (report.size_ratio > 3.0) return DiagnosticLevel::warning;
    if (report.size_ratio < 1.0 / 3.0) return DiagnosticLevel::low;
    return DiagnosticLevel::expected;
}

std::string to_string(DiagnosticLevel level) {
    switch (level) {
        case DiagnosticLevel::low: return "low";
        case DiagnosticLevel::expected: return "expected";
        case DiagnosticLevel::warning: return "warning";
    }
    return "unknown";
}

std::string render_diagnostic_table(const std::vector<DiagnosticRow>& rows, int significant) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"stage", "bearing", "size", "expected", "ratio", "flag"});
    for (const auto& row : rows) {
        cells.push_back({row.stage, format_vector(row.report.bearing_coordinates, significant),
                         format_significant(row.report.size, significant),
                         format_significant(row.report.expected_size, significant),
                         format_significant(row.report.size_ratio, significant),
                         to_string(row.level)});
    }
    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::ostringstream out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << std::left << std::setw(static_cast<int>(widths[i]) + 2) << row[i];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace beltree
