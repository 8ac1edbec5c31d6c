#pragma once

#include <string>
#include <vector>

#include "beltree/tree.hpp"

namespace beltree {

/// The dense oracle refuses trees beyond this size; local propagation is the
/// intended path for anything larger.
inline constexpr std::size_t kOracleMaxNodes = 50;

/// Global second-order specification over every distinct quantity of a tree.
struct JointBelief {
    std::vector<std::string> labels;
    Vector expectation;
    Matrix variance;

    Index index_of(const std::string& label) const;
};

/// Assembles the full joint: duplicated labels collapse to one coordinate,
/// cross-covariances of non-adjacent nodes follow the unique path between
/// them, and blocks across disconnected components are zero.
JointBelief assemble_joint(const BeliefTree& tree);

/// Direct global adjustment of the joint by the named quantities.
JointBelief global_adjust(const JointBelief& joint,
                          const std::vector<std::string>& observed_labels,
                          const Vector& values);

/// Largest relative deviation between a tree's node moments and the
/// corresponding joint blocks. Used to verify the engine against the oracle.
double compare_against_joint(const BeliefTree& tree, const JointBelief& joint);

}  // namespace beltree
