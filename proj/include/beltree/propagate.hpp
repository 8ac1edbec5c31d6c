#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "beltree/tree.hpp"

namespace beltree {

struct Observation {
    NodeRef node;
    Vector values;
};

enum class PlanStatus { planned, observed };

/// Transforms and projections for one adjustment source, covering every node
/// reachable from it, plus the outward sweep order used to apply them.
struct AdjustmentPlan {
    NodeRef source;
    std::map<std::string, TransformPair> transforms;
    PlanStatus status = PlanStatus::planned;
    std::uint64_t tree_version = 0;
    Vector source_expectation;
    /// (predecessor, next) edges in outward order, one list per branch.
    std::vector<std::vector<std::pair<std::string, std::string>>> branches;
};

struct EngineOptions {
    /// Sibling branches have disjoint write sets, so they may be swept on
    /// separate threads once the tree is large enough to pay for spawning.
    bool parallel_branches = true;
    std::size_t parallel_min_nodes = 64;
};

/// Computes P and T for every node reachable from `source` without touching
/// node or edge beliefs. Read-only on the tree.
AdjustmentPlan propagate_transforms(const BeliefTree& tree, const NodeRef& source,
                                    const EngineOptions& options = {});

/// Replaces expectations, variances and outward arc covariances with their
/// adjusted values. The plan must be fresh for the current tree version and
/// built for obs.node.
void apply_observation(BeliefTree& tree, AdjustmentPlan& plan, const Observation& obs,
                       const EngineOptions& options = {});

/// Removes a fully observed node or a leaf; with a selection, removes the
/// observed rows/columns of a partially observed node instead.
void prune(BeliefTree& tree, const NodeRef& node);

struct SequentialOptions {
    bool prune_observed = false;
    EngineOptions engine{};
};

/// Incorporates observations one node at a time: propagate, apply and
/// optionally prune for each in turn.
void sequential_adjust(BeliefTree& tree, const std::vector<Observation>& observations,
                       const SequentialOptions& options = {});

/// Absorbs all evidence on its own side of `root` first, then pushes the
/// root's cumulative transform outward once to the rest of the tree. The root
/// must separate the evidence nodes from the remainder.
void strong_root_adjust(BeliefTree& tree, const std::string& root,
                        const std::vector<Observation>& observations,
                        const EngineOptions& options = {});

}  // namespace beltree
