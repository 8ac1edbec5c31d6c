#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "beltree/belief.hpp"

namespace beltree {

/// Names a node, optionally restricted to a subset of its quantity labels.
struct NodeRef {
    std::string name;
    std::optional<std::vector<std::string>> selection;

    bool operator==(const NodeRef&) const = default;
};

struct ValidationFinding {
    enum class Severity { info, error };
    Severity severity = Severity::info;
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    std::size_t node_count = 0;
    std::size_t arc_count = 0;
    std::size_t component_count = 0;

    bool valid() const {
        for (const auto& f : findings) {
            if (f.severity == ValidationFinding::Severity::error) return false;
        }
        return true;
    }
};

struct Observation;
struct AdjustmentPlan;
struct EngineOptions;

/// Undirected belief tree (or forest): nodes hold second-order specifications,
/// arcs hold oriented cross-covariances. Mutations require exclusive access;
/// concurrent reads against an unchanging version are safe.
class BeliefTree {
public:
    struct Node {
        std::vector<std::string> labels;
        BeliefSpec spec;
        std::set<std::string> observed;
    };

    struct Arc {
        std::string from;  // rows of cov index `from` quantities
        std::string to;
        Matrix cov;
    };

    void add_node(const std::string& name, std::vector<std::string> labels, BeliefSpec spec);
    void add_arc(const std::string& from, const std::string& to, Matrix cov_from_to);

    ValidationReport validate() const;
    std::set<std::string> neighbors(const std::string& name) const;

    /// Unique simple path between two nodes of the same component.
    std::vector<std::string> path(const std::string& from, const std::string& to) const;

    bool has_node(const std::string& name) const;
    const Node& node(const std::string& name) const;
    bool has_arc(const std::string& a, const std::string& b) const;

    /// Cross-covariance with rows indexing `from`, transposed from storage when
    /// the arc was stored in the other orientation.
    Matrix arc_cov(const std::string& from, const std::string& to) const;

    /// Marks labels of `name` as observed there and in every node sharing the
    /// label (a shared label is the same underlying quantity).
    void set_observed(const std::string& name, const std::vector<std::string>& labels);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t arc_count() const { return arcs_.size(); }
    const std::vector<std::string>& node_order() const { return order_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    std::uint64_t version() const { return version_; }

    std::vector<std::string> nodes_containing(const std::string& label) const;

    /// Component id per node; ids are dense starting at 0.
    std::map<std::string, std::size_t> components() const;

private:
    friend void apply_observation(BeliefTree&, AdjustmentPlan&, const Observation&,
                                  const EngineOptions&);
    friend void prune(BeliefTree&, const NodeRef&);
    friend void strong_root_adjust(BeliefTree&, const std::string&,
                                   const std::vector<Observation>&, const EngineOptions&);

    Node& node_mut(const std::string& name);
    Matrix& arc_cov_mut(const std::string& a, const std::string& b, bool& transposed);
    void remove_node(const std::string& name);
    void bump_version() { ++version_; }

    std::map<std::string, Node> nodes_;
    std::vector<std::string> order_;
    std::vector<Arc> arcs_;
    std::map<std::string, std::set<std::string>> adjacency_;
    std::uint64_t version_ = 0;
};

}  // namespace beltree
