#include "beltree/propagate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <future>
#include <set>

namespace beltree {

namespace {

std::vector<std::string> selection_labels(const BeliefTree::Node& node, const NodeRef& ref) {
    if (!ref.selection) return node.labels;
    std::set<std::string> seen;
    for (const auto& l : *ref.selection) {
        if (std::find(node.labels.begin(), node.labels.end(), l) == node.labels.end()) {
            throw UnknownNodeError("node '" + ref.name + "' has no label '" + l + "'");
        }
        if (!seen.insert(l).second) {
            throw ShapeError("selection repeats label '" + l + "'");
        }
    }
    return *ref.selection;
}

Matrix selection_matrix(const BeliefTree::Node& node, const std::vector<std::string>& labels) {
    Matrix s = Matrix::Zero(static_cast<Index>(labels.size()), node.spec.dim());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::find(node.labels.begin(), node.labels.end(), labels[i]);
        s(static_cast<Index>(i), it - node.labels.begin()) = 1.0;
    }
    return s;
}

using NodeFilter = std::function<bool(const std::string&)>;

struct BranchResult {
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::pair<std::string, TransformPair>> transforms;
};

// Walks one branch outward, deriving each node's pair from its predecessor's
// using only the arc beliefs. Reads the tree, writes only local state.
BranchResult walk_branch(const BeliefTree& tree, const std::string& source,
                         const std::string& first, const TransformPair& source_pair,
                         const Matrix& source_var_pinv, const NodeFilter& allowed) {
    BranchResult result;
    std::map<std::string, TransformPair> pairs;
    std::map<std::string, Matrix> pinvs;
    pairs.emplace(source, source_pair);
    pinvs.emplace(source, source_var_pinv);

    std::deque<std::pair<std::string, std::string>> queue{{source, first}};
    std::set<std::string> visited{source, first};
    while (!queue.empty()) {
        auto [pred, next] = queue.front();
        queue.pop_front();

        const TransformPair& pp = pairs.at(pred);
        const Matrix& pred_pinv = pinvs.at(pred);
        const Matrix next_pinv = pseudo_inverse(tree.node(next).spec.variance);
        const Matrix p_pred_next = tree.arc_cov(next, pred) * pred_pinv;  // P_pred[next]
        const Matrix p_next_pred = tree.arc_cov(pred, next) * next_pinv;  // P_next[pred]

        TransformPair tp;
        tp.projection = compose_projection(p_pred_next, pp.projection);
        tp.transform = compose_transform(p_pred_next, pp.transform, p_next_pred);
        tp.source = source_pair.source;
        tp.target = next;

        result.edges.emplace_back(pred, next);
        result.transforms.emplace_back(next, tp);
        pairs.emplace(next, std::move(tp));
        pinvs.emplace(next, next_pinv);

        for (const auto& nb : tree.neighbors(next)) {
            if (!visited.count(nb) && allowed(nb)) {
                visited.insert(nb);
                queue.emplace_back(next, nb);
            }
        }
    }
    return result;
}

AdjustmentPlan propagate_impl(const BeliefTree& tree, const NodeRef& source,
                              const NodeFilter& allowed, const EngineOptions& options) {
    const BeliefTree::Node& src = tree.node(source.name);
    const std::vector<std::string> labels = selection_labels(src, source);
    const Matrix s = selection_matrix(src, labels);
    const Matrix& v = src.spec.variance;
    const Matrix var_x = symmetrize(s * v * s.transpose());
    const Matrix cov_bx = v * s.transpose();
    const Matrix var_x_pinv = pseudo_inverse(var_x);
    const Matrix v_pinv = pseudo_inverse(v);

    AdjustmentPlan plan;
    plan.source = source;
    plan.tree_version = tree.version();
    plan.source_expectation = s * src.spec.expectation;

    TransformPair src_pair;
    src_pair.projection = cov_bx * var_x_pinv;            // P_X[B_j]
    src_pair.transform = src_pair.projection * (s * v * v_pinv);  // P_X[B_j] P_{B_j}[X]
    src_pair.source = source.name;
    src_pair.target = source.name;

    std::vector<std::string> branch_roots;
    for (const auto& nb : tree.neighbors(source.name)) {
        if (allowed(nb)) branch_roots.push_back(nb);
    }

    std::vector<BranchResult> results(branch_roots.size());
    const bool parallel = options.parallel_branches && branch_roots.size() >= 2 &&
                          tree.node_count() >= options.parallel_min_nodes;
    if (parallel) {
        std::vector<std::future<BranchResult>> futures;
        futures.reserve(branch_roots.size());
        for (const auto& root : branch_roots) {
            futures.push_back(std::async(std::launch::async, [&, root] {
                return walk_branch(tree, source.name, root, src_pair, v_pinv, allowed);
            }));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < branch_roots.size(); ++i) {
            results[i] = walk_branch(tree, source.name, branch_roots[i], src_pair, v_pinv,
                                     allowed);
        }
    }

    plan.transforms.emplace(source.name, std::move(src_pair));
    for (auto& br : results) {
        for (auto& [name, tp] : br.transforms) plan.transforms.emplace(name, std::move(tp));
        plan.branches.push_back(std::move(br.edges));
    }
    return plan;
}

}  // namespace

AdjustmentPlan propagate_transforms(const BeliefTree& tree, const NodeRef& source,
                                    const EngineOptions& options) {
    return propagate_impl(tree, source, [](const std::string&) { return true; }, options);
}

void apply_observation(BeliefTree& tree, AdjustmentPlan& plan, const Observation& obs,
                       const EngineOptions& options) {
    if (plan.status != PlanStatus::planned) {
        throw StalePlanError("plan has already been applied");
    }
    if (plan.tree_version != tree.version()) {
        throw StalePlanError("tree changed since the plan was built (version " +
                             std::to_string(plan.tree_version) + " vs " +
                             std::to_string(tree.version()) + ")");
    }
    if (!(obs.node == plan.source)) {
        throw PlanMismatchError("plan was built for node '" + plan.source.name +
                                "', observation targets '" + obs.node.name + "'");
    }
    require_finite(obs.values, "observation values");
    if (obs.values.size() != plan.source_expectation.size()) {
        throw ShapeError("observation of '" + obs.node.name + "' has " +
                         std::to_string(obs.values.size()) + " values, expected " +
                         std::to_string(plan.source_expectation.size()));
    }

    const BeliefTree::Node& src = tree.node(plan.source.name);
    const std::vector<std::string> labels = selection_labels(src, plan.source);
    const Vector innovation = obs.values - plan.source_expectation;

    auto update_node = [&](const std::string& name) {
        const TransformPair& tp = plan.transforms.at(name);
        BeliefTree::Node& nd = tree.node_mut(name);
        const Matrix id = Matrix::Identity(nd.spec.dim(), nd.spec.dim());
        nd.spec.expectation += tp.projection * innovation;
        nd.spec.variance = symmetrize((id - tp.transform) * nd.spec.variance);
    };
    auto update_arc = [&](const std::string& pred, const std::string& next) {
        const Matrix& t_pred = plan.transforms.at(pred).transform;
        bool transposed = false;
        Matrix& cov = tree.arc_cov_mut(pred, next, transposed);
        if (transposed) {
            cov -= cov * t_pred.transpose();
        } else {
            cov -= t_pred * cov;
        }
    };
    auto sweep = [&](const std::vector<std::pair<std::string, std::string>>& edges) {
        for (const auto& [pred, next] : edges) {
            update_arc(pred, next);
            update_node(next);
        }
    };

    update_node(plan.source.name);
    const bool parallel = options.parallel_branches && plan.branches.size() >= 2 &&
                          tree.node_count() >= options.parallel_min_nodes;
    if (parallel) {
        std::vector<std::future<void>> futures;
        futures.reserve(plan.branches.size());
        for (const auto& edges : plan.branches) {
            futures.push_back(std::async(std::launch::async, [&sweep, &edges] { sweep(edges); }));
        }
        for (auto& f : futures) f.get();
    } else {
        for (const auto& edges : plan.branches) sweep(edges);
    }

    tree.set_observed(plan.source.name, labels);  // bumps the tree version
    plan.status = PlanStatus::observed;
}

void prune(BeliefTree& tree, const NodeRef& ref) {
    const BeliefTree::Node& n = tree.node(ref.name);
    std::set<std::string> drop;
    if (ref.selection) {
        for (const auto& l : *ref.selection) {
            if (std::find(n.labels.begin(), n.labels.end(), l) == n.labels.end()) {
                throw UnknownNodeError("node '" + ref.name + "' has no label '" + l + "'");
            }
            drop.insert(l);
        }
    }
    const bool partial = ref.selection && drop.size() < n.labels.size();
    if (partial) {
        for (const auto& l : drop) {
            if (!n.observed.count(l)) {
                throw InvalidPruneError("label '" + l + "' of node '" + ref.name +
                                        "' has not been observed");
            }
        }
        std::vector<Index> keep;
        std::vector<std::string> kept_labels;
        for (Index i = 0; i < n.spec.dim(); ++i) {
            if (!drop.count(n.labels[static_cast<std::size_t>(i)])) {
                keep.push_back(i);
                kept_labels.push_back(n.labels[static_cast<std::size_t>(i)]);
            }
        }
        const Index k = static_cast<Index>(keep.size());
        BeliefTree::Node& nd = tree.node_mut(ref.name);
        Vector e(k);
        Matrix v(k, k);
        for (Index i = 0; i < k; ++i) {
            e(i) = nd.spec.expectation(keep[static_cast<std::size_t>(i)]);
            for (Index j = 0; j < k; ++j) {
                v(i, j) = nd.spec.variance(keep[static_cast<std::size_t>(i)],
                                           keep[static_cast<std::size_t>(j)]);
            }
        }
        nd.spec.expectation = std::move(e);
        nd.spec.variance = std::move(v);
        nd.labels = std::move(kept_labels);
        for (const auto& l : drop) nd.observed.erase(l);
        for (const auto& nb : tree.neighbors(ref.name)) {
            bool transposed = false;
            Matrix& cov = tree.arc_cov_mut(ref.name, nb, transposed);
            Matrix shrunk;
            if (transposed) {
                shrunk.resize(cov.rows(), k);
                for (Index j = 0; j < k; ++j) {
                    shrunk.col(j) = cov.col(keep[static_cast<std::size_t>(j)]);
                }
            } else {
                shrunk.resize(k, cov.cols());
                for (Index i = 0; i < k; ++i) {
                    shrunk.row(i) = cov.row(keep[static_cast<std::size_t>(i)]);
                }
            }
            cov = std::move(shrunk);
        }
        tree.bump_version();
        return;
    }

    const bool fully_observed =
        std::all_of(n.labels.begin(), n.labels.end(),
                    [&](const std::string& l) { return n.observed.count(l) > 0; });
    const bool leaf = tree.neighbors(ref.name).size() <= 1;
    if (!fully_observed && !leaf) {
        throw InvalidPruneError("node '" + ref.name +
                                "' is interior and not fully observed");
    }
    tree.remove_node(ref.name);
    tree.bump_version();
}

void sequential_adjust(BeliefTree& tree, const std::vector<Observation>& observations,
                       const SequentialOptions& options) {
    for (const Observation& obs : observations) {
        AdjustmentPlan plan = propagate_transforms(tree, obs.node, options.engine);
        apply_observation(tree, plan, obs, options.engine);
        if (options.prune_observed) {
            prune(tree, obs.node);
        }
    }
}

void strong_root_adjust(BeliefTree& tree, const std::string& root,
                        const std::vector<Observation>& observations,
                        const EngineOptions& options) {
    const BeliefTree::Node& root_node = tree.node(root);
    if (observations.empty()) return;

    // label each non-root node with the side of the root it falls on
    std::map<std::string, int> side;
    int side_count = 0;
    for (const auto& nb : tree.neighbors(root)) {
        if (side.count(nb)) continue;
        const int id = side_count++;
        std::deque<std::string> queue{nb};
        side[nb] = id;
        while (!queue.empty()) {
            std::string cur = queue.front();
            queue.pop_front();
            for (const auto& next : tree.neighbors(cur)) {
                if (next != root && !side.count(next)) {
                    side[next] = id;
                    queue.push_back(next);
                }
            }
        }
    }

    int evidence_side = -1;
    for (const Observation& obs : observations) {
        tree.node(obs.node.name);
        if (obs.node.name == root) continue;
        auto it = side.find(obs.node.name);
        if (it == side.end()) {
            throw InvalidRootError("evidence node '" + obs.node.name +
                                   "' is not connected to root '" + root + "'");
        }
        if (evidence_side >= 0 && it->second != evidence_side) {
            throw InvalidRootError("root '" + root +
                                   "' does not separate the evidence nodes from the "
                                   "remainder of the tree");
        }
        evidence_side = it->second;
    }

    auto allowed = [&](const std::string& name) {
        if (name == root) return true;
        auto it = side.find(name);
        return it != side.end() && evidence_side >= 0 && it->second == evidence_side;
    };

    const BeliefSpec prior_root = root_node.spec;
    Matrix t_cum = Matrix::Zero(prior_root.dim(), prior_root.dim());

    for (const Observation& obs : observations) {
        AdjustmentPlan plan = propagate_impl(tree, obs.node, allowed, options);
        const Matrix t_stage = plan.transforms.at(root).transform;
        apply_observation(tree, plan, obs, options);
        t_cum = accumulate_transform(t_cum, t_stage);
    }

    // one outward sweep into the untouched sides, driven by the root's
    // cumulative transform and expectation shift against its prior beliefs
    const Vector delta_root = tree.node(root).spec.expectation - prior_root.expectation;
    const Matrix root_pinv = pseudo_inverse(prior_root.variance);

    std::map<std::string, Matrix> t_of{{root, t_cum}};
    std::map<std::string, Vector> delta_of{{root, delta_root}};
    std::map<std::string, Matrix> pinv_of{{root, root_pinv}};

    std::deque<std::pair<std::string, std::string>> queue;
    for (const auto& nb : tree.neighbors(root)) {
        if (!allowed(nb)) queue.emplace_back(root, nb);
    }
    std::set<std::string> visited{root};
    for (const auto& [pred, next] : queue) visited.insert(next);

    while (!queue.empty()) {
        auto [pred, next] = queue.front();
        queue.pop_front();

        const Matrix next_pinv = pseudo_inverse(tree.node(next).spec.variance);
        const Matrix p_pred_next = tree.arc_cov(next, pred) * pinv_of.at(pred);
        const Matrix p_next_pred = tree.arc_cov(pred, next) * next_pinv;
        const Matrix t_next = compose_transform(p_pred_next, t_of.at(pred), p_next_pred);
        const Vector delta_next = p_pred_next * delta_of.at(pred);

        const Matrix& t_pred = t_of.at(pred);
        bool transposed = false;
        Matrix& cov = tree.arc_cov_mut(pred, next, transposed);
        if (transposed) {
            cov -= cov * t_pred.transpose();
        } else {
            cov -= t_pred * cov;
        }

        BeliefTree::Node& nd = tree.node_mut(next);
        const Matrix id = Matrix::Identity(nd.spec.dim(), nd.spec.dim());
        nd.spec.expectation += delta_next;
        nd.spec.variance = symmetrize((id - t_next) * nd.spec.variance);

        t_of.emplace(next, t_next);
        delta_of.emplace(next, delta_next);
        pinv_of.emplace(next, next_pinv);

        for (const auto& nb : tree.neighbors(next)) {
            if (!visited.count(nb)) {
                visited.insert(nb);
                queue.emplace_back(next, nb);
            }
        }
    }
    tree.bump_version();
}

}  // namespace beltree
