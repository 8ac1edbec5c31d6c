#include "beltree/tree.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

namespace beltree {

namespace {

void check_name(const std::string& name, const char* what) {
    if (name.empty()) throw ShapeError(std::string(what) + " must not be empty");
    for (char c : name) {
        if (c == '#' || std::isspace(static_cast<unsigned char>(c))) {
            throw ShapeError(std::string(what) + " '" + name +
                             "' contains whitespace or '#'");
        }
    }
}

}  // namespace

void BeliefTree::add_node(const std::string& name, std::vector<std::string> labels,
                          BeliefSpec spec) {
    check_name(name, "node name");
    if (nodes_.count(name)) {
        throw DuplicateNodeError("node '" + name + "' already exists");
    }
    validate_belief_spec(spec, "node '" + name + "'");
    if (static_cast<Index>(labels.size()) != spec.dim()) {
        throw ShapeError("node '" + name + "': " + std::to_string(labels.size()) +
                         " labels for a " + std::to_string(spec.dim()) +
                         "-dimensional belief");
    }
    std::set<std::string> seen;
    for (const auto& l : labels) {
        check_name(l, "quantity label");
        if (!seen.insert(l).second) {
            throw DuplicateNodeError("node '" + name + "': duplicate label '" + l + "'");
        }
    }
    nodes_.emplace(name, Node{std::move(labels), std::move(spec), {}});
    order_.push_back(name);
    adjacency_[name];
    bump_version();
}

void BeliefTree::add_arc(const std::string& from, const std::string& to, Matrix cov) {
    const Node& a = node(from);
    const Node& b = node(to);
    if (from == to) throw CycleError("arc from '" + from + "' to itself");
    require_finite(cov, "arc covariance");
    if (cov.rows() != a.spec.dim() || cov.cols() != b.spec.dim()) {
        throw ShapeError("arc (" + from + ", " + to + "): covariance is " +
                         std::to_string(cov.rows()) + "x" + std::to_string(cov.cols()) +
                         ", expected " + std::to_string(a.spec.dim()) + "x" +
                         std::to_string(b.spec.dim()));
    }
    if (has_arc(from, to)) {
        throw DuplicateNodeError("arc (" + from + ", " + to + ") already exists");
    }
    // joining two nodes already in one component would close a cycle
    std::set<std::string> seen{from};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        if (cur == to) {
            throw CycleError("arc (" + from + ", " + to + ") would create a cycle");
        }
        for (const auto& nb : adjacency_.at(cur)) {
            if (seen.insert(nb).second) queue.push_back(nb);
        }
    }
    arcs_.push_back(Arc{from, to, std::move(cov)});
    adjacency_[from].insert(to);
    adjacency_[to].insert(from);
    bump_version();
}

bool BeliefTree::has_node(const std::string& name) const { return nodes_.count(name) > 0; }

const BeliefTree::Node& BeliefTree::node(const std::string& name) const {
    auto it = nodes_.find(name);
    if (it == nodes_.end()) throw UnknownNodeError("unknown node '" + name + "'");
    return it->second;
}

BeliefTree::Node& BeliefTree::node_mut(const std::string& name) {
    auto it = nodes_.find(name);
    if (it == nodes_.end()) throw UnknownNodeError("unknown node '" + name + "'");
    return it->second;
}

bool BeliefTree::has_arc(const std::string& a, const std::string& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) > 0;
}

Matrix BeliefTree::arc_cov(const std::string& from, const std::string& to) const {
    for (const Arc& arc : arcs_) {
        if (arc.from == from && arc.to == to) return arc.cov;
        if (arc.from == to && arc.to == from) return arc.cov.transpose();
    }
    throw UnknownNodeError("no arc between '" + from + "' and '" + to + "'");
}

Matrix& BeliefTree::arc_cov_mut(const std::string& a, const std::string& b,
                                bool& transposed) {
    for (Arc& arc : arcs_) {
        if (arc.from == a && arc.to == b) {
            transposed = false;
            return arc.cov;
        }
        if (arc.from == b && arc.to == a) {
            transposed = true;
            return arc.cov;
        }
    }
    throw UnknownNodeError("no arc between '" + a + "' and '" + b + "'");
}

std::set<std::string> BeliefTree::neighbors(const std::string& name) const {
    node(name);
    auto it = adjacency_.find(name);
    return it == adjacency_.end() ? std::set<std::string>{} : it->second;
}

std::map<std::string, std::size_t> BeliefTree::components() const {
    std::map<std::string, std::size_t> comp;
    std::size_t next = 0;
    for (const auto& name : order_) {
        if (comp.count(name)) continue;
        std::deque<std::string> queue{name};
        comp[name] = next;
        while (!queue.empty()) {
            std::string cur = queue.front();
            queue.pop_front();
            auto it = adjacency_.find(cur);
            if (it == adjacency_.end()) continue;
            for (const auto& nb : it->second) {
                if (!comp.count(nb)) {
                    comp[nb] = next;
                    queue.push_back(nb);
                }
            }
        }
        ++next;
    }
    return comp;
}

std::vector<std::string> BeliefTree::path(const std::string& from, const std::string& to) const {
    node(from);
    node(to);
    if (from == to) return {from};
    std::map<std::string, std::string> parent;
    std::deque<std::string> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        std::string cur = queue.front();
        queue.pop_front();
        auto it = adjacency_.find(cur);
        if (it == adjacency_.end()) continue;
        for (const auto& nb : it->second) {
            if (parent.count(nb)) continue;
            parent[nb] = cur;
            if (nb == to) {
                std::vector<std::string> result{to};
                std::string back = to;
                while (back != from) {
                    back = parent[back];
                    result.push_back(back);
                }
                std::reverse(result.begin(), result.end());
                return result;
            }
            queue.push_back(nb);
        }
    }
    throw NoPathError("nodes '" + from + "' and '" + to + "' are in different components");
}

void BeliefTree::set_observed(const std::string& name, const std::vector<std::string>& labels) {
    const Node& n = node(name);
    for (const auto& l : labels) {
        if (std::find(n.labels.begin(), n.labels.end(), l) == n.labels.end()) {
            throw UnknownNodeError("node '" + name + "' has no label '" + l + "'");
        }
    }
    for (const auto& l : labels) {
        for (auto& [nm, nd] : nodes_) {
            if (std::find(nd.labels.begin(), nd.labels.end(), l) != nd.labels.end()) {
                nd.observed.insert(l);
            }
        }
    }
    bump_version();
}

std::vector<std::string> BeliefTree::nodes_containing(const std::string& label) const {
    std::vector<std::string> result;
    for (const auto& name : order_) {
        const Node& n = nodes_.at(name);
        if (std::find(n.labels.begin(), n.labels.end(), label) != n.labels.end()) {
            result.push_back(name);
        }
    }
    return result;
}

void BeliefTree::remove_node(const std::string& name) {
    node(name);
    nodes_.erase(name);
    order_.erase(std::remove(order_.begin(), order_.end(), name), order_.end());
    arcs_.erase(std::remove_if(arcs_.begin(), arcs_.end(),
                               [&](const Arc& a) { return a.from == name || a.to == name; }),
                arcs_.end());
    for (auto& [nm, nbs] : adjacency_) nbs.erase(name);
    adjacency_.erase(name);
}

ValidationReport BeliefTree::validate() const {
    ValidationReport report;
    report.node_count = nodes_.size();
    report.arc_count = arcs_.size();
    auto comp = components();
    std::set<std::size_t> ids;
    for (const auto& [name, id] : comp) ids.insert(id);
    report.component_count = ids.size();

    using Sev = ValidationFinding::Severity;
    // acyclicity: a forest has exactly nodes - components arcs
    if (arcs_.size() + report.component_count != nodes_.size() && !nodes_.empty()) {
        report.findings.push_back({Sev::error, "cycle",
                                   "arc set does not form a forest (" +
                                       std::to_string(arcs_.size()) + " arcs, " +
                                       std::to_string(nodes_.size()) + " nodes, " +
                                       std::to_string(report.component_count) +
                                       " components)"});
    }
    if (report.component_count > 1) {
        report.findings.push_back({Sev::info, "forest",
                                   std::to_string(report.component_count) +
                                       " components; adjustment never crosses components"});
    }
    for (const auto& name : order_) {
        const Node& n = nodes_.at(name);
        if (!is_psd(n.spec.variance)) {
            report.findings.push_back({Sev::error, "not-psd",
                                       "variance of node '" + name +
                                           "' is not positive semi-definite"});
        }
    }
    for (const Arc& arc : arcs_) {
        const Node& a = nodes_.at(arc.from);
        const Node& b = nodes_.at(arc.to);
        const Index da = a.spec.dim(), db = b.spec.dim();
        Matrix joint(da + db, da + db);
        joint.topLeftCorner(da, da) = a.spec.variance;
        joint.topRightCorner(da, db) = arc.cov;
        joint.bottomLeftCorner(db, da) = arc.cov.transpose();
        joint.bottomRightCorner(db, db) = b.spec.variance;
        if (!is_psd(joint)) {
            report.findings.push_back({Sev::error, "not-psd",
                                       "joint block over arc (" + arc.from + ", " +
                                           arc.to + ") is not positive semi-definite"});
        }
    }
    return report;
}

}  // namespace beltree
