#include "beltree/joint.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace beltree {

Index JointBelief::index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw UnknownNodeError("joint belief has no quantity '" + label + "'");
    }
    return it - labels.begin();
}

JointBelief assemble_joint(const BeliefTree& tree) {
    if (tree.node_count() > kOracleMaxNodes) {
        throw OracleSizeError("joint assembly refused for " +
                              std::to_string(tree.node_count()) + " nodes (limit " +
                              std::to_string(kOracleMaxNodes) +
                              "); use local propagation instead");
    }
    if (tree.node_count() == 0) {
        throw UnknownNodeError("cannot assemble a joint over an empty tree");
    }

    // home of each label: first node (in insertion order) that carries it
    struct Home {
        std::string node;
        Index row;    // index within the home node
        Index joint;  // coordinate in the joint
    };
    std::map<std::string, Home> homes;
    JointBelief joint;
    for (const auto& name : tree.node_order()) {
        const BeliefTree::Node& n = tree.node(name);
        for (std::size_t i = 0; i < n.labels.size(); ++i) {
            if (homes.count(n.labels[i])) continue;
            homes[n.labels[i]] = Home{name, static_cast<Index>(i),
                                      static_cast<Index>(joint.labels.size())};
            joint.labels.push_back(n.labels[i]);
        }
    }
    const Index dim = static_cast<Index>(joint.labels.size());
    joint.expectation = Vector::Zero(dim);
    joint.variance = Matrix::Zero(dim, dim);

    // joint coordinates of the home labels of each node
    std::map<std::string, std::vector<std::pair<Index, Index>>> home_rows;
    for (const auto& [label, home] : homes) {
        home_rows[home.node].emplace_back(home.row, home.joint);
        joint.expectation(home.joint) =
            tree.node(home.node).spec.expectation(home.row);
    }

    std::map<std::string, Matrix> pinvs;
    auto pinv_of = [&](const std::string& name) -> const Matrix& {
        auto it = pinvs.find(name);
        if (it == pinvs.end()) {
            it = pinvs.emplace(name, pseudo_inverse(tree.node(name).spec.variance)).first;
        }
        return it->second;
    };

    // BFS from each node carrying home labels, chaining cov(a, z) along paths
    for (const auto& [a, rows_a] : home_rows) {
        std::map<std::string, Matrix> cov_a;  // cov(node a block, node z block)
        cov_a[a] = tree.node(a).spec.variance;
        std::deque<std::string> queue{a};
        std::map<std::string, bool> seen{{a, true}};
        while (!queue.empty()) {
            std::string cur = queue.front();
            queue.pop_front();
            for (const auto& nb : tree.neighbors(cur)) {
                if (seen.count(nb)) continue;
                seen[nb] = true;
                if (cur == a) {
                    cov_a[nb] = tree.arc_cov(a, nb);
                } else {
                    cov_a[nb] = cov_a.at(cur) * pinv_of(cur) * tree.arc_cov(cur, nb);
                }
                queue.push_back(nb);
            }
        }
        for (const auto& [z, rows_z] : home_rows) {
            auto it = cov_a.find(z);
            if (it == cov_a.end()) continue;  // different component: stays zero
            const Matrix& block = it->second;
            for (const auto& [ra, ja] : rows_a) {
                for (const auto& [rz, jz] : rows_z) {
                    joint.variance(ja, jz) = block(ra, rz);
                }
            }
        }
    }
    joint.variance = symmetrize(joint.variance);
    return joint;
}

JointBelief global_adjust(const JointBelief& joint,
                          const std::vector<std::string>& observed_labels,
                          const Vector& values) {
    if (static_cast<Index>(observed_labels.size()) != values.size()) {
        throw ShapeError("global_adjust: " + std::to_string(observed_labels.size()) +
                         " labels against " + std::to_string(values.size()) + " values");
    }
    require_finite(values, "global_adjust values");
    if (observed_labels.empty()) return joint;

    std::vector<Index> d;
    d.reserve(observed_labels.size());
    for (const auto& l : observed_labels) d.push_back(joint.index_of(l));

    const Index dim = joint.expectation.size();
    const Index k = static_cast<Index>(d.size());
    Matrix cov_all_d(dim, k);
    Matrix var_d(k, k);
    Vector e_d(k);
    for (Index j = 0; j < k; ++j) {
        cov_all_d.col(j) = joint.variance.col(d[static_cast<std::size_t>(j)]);
        e_d(j) = joint.expectation(d[static_cast<std::size_t>(j)]);
        for (Index i = 0; i < k; ++i) {
            var_d(i, j) = joint.variance(d[static_cast<std::size_t>(i)],
                                         d[static_cast<std::size_t>(j)]);
        }
    }
    const Matrix gain = cov_all_d * pseudo_inverse(symmetrize(var_d));
    JointBelief adjusted;
    adjusted.labels = joint.labels;
    adjusted.expectation = joint.expectation + gain * (values - e_d);
    adjusted.variance = symmetrize(joint.variance - gain * cov_all_d.transpose());
    return adjusted;
}

double compare_against_joint(const BeliefTree& tree, const JointBelief& joint) {
    double worst = 0.0;
    for (const auto& name : tree.node_order()) {
        const BeliefTree::Node& n = tree.node(name);
        const Index d = n.spec.dim();
        std::vector<Index> idx;
        idx.reserve(static_cast<std::size_t>(d));
        for (const auto& l : n.labels) idx.push_back(joint.index_of(l));

        double scale = 1.0;
        for (Index i = 0; i < d; ++i) {
            scale = std::max(scale, std::abs(joint.expectation(idx[static_cast<std::size_t>(i)])));
            for (Index j = 0; j < d; ++j) {
                scale = std::max(scale, std::abs(joint.variance(
                                            idx[static_cast<std::size_t>(i)],
                                            idx[static_cast<std::size_t>(j)])));
            }
        }
        for (Index i = 0; i < d; ++i) {
            worst = std::max(worst,
                             std::abs(n.spec.expectation(i) -
                                      joint.expectation(idx[static_cast<std::size_t>(i)])) /
                                 scale);
            for (Index j = 0; j < d; ++j) {
                worst = std::max(
                    worst, std::abs(n.spec.variance(i, j) -
                                    joint.variance(idx[static_cast<std::size_t>(i)],
                                                   idx[static_cast<std::size_t>(j)])) /
                               scale);
            }
        }
    }
    return worst;
}

}  // namespace beltree
