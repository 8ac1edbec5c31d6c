#pragma once

#include <random>
#include <string>
#include <vector>

#include "beltree/joint.hpp"
#include "beltree/models.hpp"
#include "beltree/propagate.hpp"

namespace beltree::testing {

inline Matrix random_matrix(std::mt19937& rng, Index rows, Index cols) {
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

inline Vector random_vector(std::mt19937& rng, Index n) {
    std::normal_distribution<double> dist;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

/// Random PSD matrix of the given rank (rank <= n).
inline Matrix random_psd(std::mt19937& rng, Index n, Index rank) {
    Matrix r = random_matrix(rng, n, rank);
    return symmetrize(r * r.transpose());
}

/// The worked dynamic linear model used throughout the tests: locally linear
/// growth with level/slope noise components carried through the transition.
inline DlmSpec growth_dlm_spec(std::size_t horizon = 4) {
    DlmSpec spec;
    spec.horizon = horizon;
    spec.obs_map = (Matrix(1, 2) << 1, 0).finished();
    spec.state_transition = (Matrix(2, 2) << 1, 1, 0, 1).finished();
    spec.state1_expectation = (Vector(2) << 20, 0).finished();
    spec.state1_variance = (Matrix(2, 2) << 400, 0, 0, 9).finished();
    spec.obs_noise_variance = (Matrix(1, 1) << 171).finished();
    spec.state_noise_variance =
        spec.state_transition *
        (Matrix(2, 2) << 4.75, 0, 0, 0.36).finished() *
        spec.state_transition.transpose();
    return spec;
}

/// Builds a random tree whose node and arc beliefs are consistent with a
/// global joint (each child is a linear map of its parent plus independent
/// noise), so local propagation and the dense oracle must agree.
struct RandomTreeOptions {
    std::size_t max_nodes = 6;
    Index max_dim = 4;
    bool allow_singular = true;
};

inline BeliefTree random_consistent_tree(std::mt19937& rng,
                                         const RandomTreeOptions& opts = {}) {
    std::uniform_int_distribution<std::size_t> node_count_dist(2, opts.max_nodes);
    std::uniform_int_distribution<Index> dim_dist(1, opts.max_dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t count = node_count_dist(rng);
    BeliefTree tree;
    std::vector<std::string> names;
    std::vector<Index> dims;
    for (std::size_t i = 0; i < count; ++i) {
        names.push_back("n" + std::to_string(i));
        dims.push_back(dim_dist(rng));
    }

    auto rank_of = [&](Index n) {
        if (opts.allow_singular && unit(rng) < 0.3 && n > 1) {
            return std::uniform_int_distribution<Index>(1, n)(rng);
        }
        return n;
    };

    std::vector<BeliefSpec> specs(count);
    specs[0].expectation = random_vector(rng, dims[0]);
    specs[0].variance = random_psd(rng, dims[0], rank_of(dims[0]));
    std::vector<std::string> labels0;
    for (Index k = 0; k < dims[0]; ++k) {
        labels0.push_back(names[0] + "_q" + std::to_string(k));
    }
    tree.add_node(names[0], labels0, specs[0]);

    for (std::size_t i = 1; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> parent_dist(0, i - 1);
        const std::size_t parent = parent_dist(rng);
        // child = A * parent + noise keeps the joint tree-consistent
        Matrix a = random_matrix(rng, dims[i], dims[parent]);
        Matrix noise = random_psd(rng, dims[i], rank_of(dims[i]));
        BeliefSpec spec;
        spec.expectation = random_vector(rng, dims[i]);
        spec.variance = symmetrize(a * specs[parent].variance * a.transpose() + noise);
        Matrix cov_parent_child = specs[parent].variance * a.transpose();

        std::vector<std::string> labels;
        for (Index k = 0; k < dims[i]; ++k) {
            labels.push_back(names[i] + "_q" + std::to_string(k));
        }
        tree.add_node(names[i], labels, spec);
        tree.add_arc(names[parent], names[i], cov_parent_child);
        specs[i] = std::move(spec);
    }
    return tree;
}

/// Observation values consistent with the node's variance support.
inline Vector consistent_values(std::mt19937& rng, const BeliefTree& tree,
                                const NodeRef& ref) {
    const auto& node = tree.node(ref.name);
    Vector full = node.spec.expectation +
                  psd_factor(node.spec.variance) * random_vector(rng, node.spec.dim());
    if (!ref.selection) return full;
    Vector picked(static_cast<Index>(ref.selection->size()));
    for (std::size_t i = 0; i < ref.selection->size(); ++i) {
        for (std::size_t j = 0; j < node.labels.size(); ++j) {
            if (node.labels[j] == (*ref.selection)[i]) {
                picked(static_cast<Index>(i)) = full(static_cast<Index>(j));
            }
        }
    }
    return picked;
}

}  // namespace beltree::testing
