#include "beltree/model_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "beltree/format.hpp"
#include "beltree/models.hpp"

namespace beltree {

namespace {

struct Token {
    std::string text;
    int col = 1;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        int depth = 0;
        while (i < line.size()) {
            char c = line[i];
            if (c == '#' && depth == 0) break;
            if (std::isspace(static_cast<unsigned char>(c)) && depth == 0) break;
            if (c == '[') ++depth;
            if (c == ']') --depth;
            ++i;
        }
        tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return tokens;
}

double parse_number(const std::string& text, int line, int col) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + text.size() || text.empty()) {
        throw ParseError("expected a number, got '" + text + "'", line, col);
    }
    if (!std::isfinite(value)) {
        throw ParseError("number '" + text + "' is not finite", line, col);
    }
    return value;
}

struct NodeBlock {
    std::string name;
    std::vector<std::string> labels;
    std::vector<std::string> observed;
    std::vector<double> expectation;
    std::vector<std::vector<double>> variance_rows;
    int line = 0;
};

struct ArcBlock {
    std::string from;
    std::string to;
    std::vector<std::vector<double>> rows;
    int line = 0;
};

struct BuilderStmt {
    std::string kind;
    std::map<std::string, std::string> params;
    int line = 0;
};

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows, int line) {
    if (rows.empty()) throw ParseError("matrix has no rows", line, 1);
    const std::size_t cols = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw ParseError("matrix rows have inconsistent lengths", line, 1);
        }
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

// splits "[..],[..],[..]" on commas at bracket depth zero
std::vector<std::string> split_top_level(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    int depth = 0;
    for (char c : text) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

std::size_t parse_count(const std::string& text, int line) {
    double v = parse_number(text, line, 1);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ParseError("expected a non-negative integer, got '" + text + "'", line, 1);
    }
    return static_cast<std::size_t>(v);
}

const std::string& require_param(const BuilderStmt& b, const std::string& key) {
    auto it = b.params.find(key);
    if (it == b.params.end()) {
        throw ParseError("builder " + b.kind + " is missing parameter '" + key + "'",
                         b.line, 1);
    }
    return it->second;
}

BeliefTree run_builder(const BuilderStmt& b) {
    if (b.kind == "dlm") {
        DlmSpec spec;
        spec.horizon = parse_count(require_param(b, "horizon"), b.line);
        spec.obs_map = parse_matrix_literal(require_param(b, "obs_map"));
        spec.state_transition = parse_matrix_literal(require_param(b, "state_transition"));
        spec.state1_expectation =
            parse_vector_literal(require_param(b, "state1_expectation"));
        spec.state1_variance = parse_matrix_literal(require_param(b, "state1_variance"));
        spec.obs_noise_variance =
            parse_matrix_literal(require_param(b, "obs_noise_variance"));
        spec.state_noise_variance =
            parse_matrix_literal(require_param(b, "state_noise_variance"));
        return build_dlm(spec);
    }
    if (b.kind == "nstep") {
        NStepSpec spec;
        spec.n = parse_count(require_param(b, "n"), b.line);
        spec.series_count = parse_count(require_param(b, "series"), b.line);
        spec.observable_count = parse_count(require_param(b, "observables"), b.line);
        spec.mean_variance = parse_matrix_literal(require_param(b, "mean_variance"));
        for (const auto& part : split_top_level(require_param(b, "residuals"))) {
            spec.residual_covariances.push_back(parse_matrix_literal(part));
        }
        if (auto it = b.params.find("mean_expectation"); it != b.params.end()) {
            spec.mean_expectation = parse_vector_literal(it->second);
        }
        return build_nstep_chain(spec);
    }
    throw ParseError("unknown builder kind '" + b.kind + "'", b.line, 1);
}

void merge_into(BeliefTree& dst, const BeliefTree& src) {
    for (const auto& name : src.node_order()) {
        const BeliefTree::Node& n = src.node(name);
        dst.add_node(name, n.labels, n.spec);
        if (!n.observed.empty()) {
            dst.set_observed(name, {n.observed.begin(), n.observed.end()});
        }
    }
    for (const auto& arc : src.arcs()) {
        dst.add_arc(arc.from, arc.to, arc.cov);
    }
}

}  // namespace

Matrix parse_matrix_literal(const std::string& text) {
    std::string body = text;
    // trim whitespace and one optional bracket pair
    auto trim = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    trim(body);
    if (!body.empty() && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::vector<double>> rows;
    std::stringstream row_stream(body);
    std::string row;
    while (std::getline(row_stream, row, ';')) {
        std::vector<double> entries;
        std::string entry;
        std::stringstream entry_stream(row);
        while (entry_stream >> entry) {
            for (const auto& piece : split_top_level(entry)) {
                if (piece.empty()) continue;
                entries.push_back(parse_number(piece, 1, 1));
            }
        }
        if (!entries.empty()) rows.push_back(std::move(entries));
    }
    if (rows.empty()) throw ParseError("empty matrix literal '" + text + "'", 1, 1);
    return rows_to_matrix(rows, 1);
}

Vector parse_vector_literal(const std::string& text) {
    Matrix m = parse_matrix_literal(text);
    if (m.rows() == 1) return m.row(0).transpose();
    if (m.cols() == 1) return m.col(0);
    throw ParseError("expected a vector literal, got a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix",
                     1, 1);
}

BeliefTree parse_model(const std::string& text) {
    enum class Section { none, nodes, arcs, builders };
    Section section = Section::none;

    std::vector<NodeBlock> node_blocks;
    std::vector<ArcBlock> arc_blocks;
    std::vector<BuilderStmt> builders;
    NodeBlock* open_node = nullptr;
    ArcBlock* open_arc = nullptr;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        auto tokens = tokenize(raw);
        if (tokens.empty()) continue;
        const Token& head = tokens[0];

        if (head.text == "nodes:" || head.text == "arcs:" || head.text == "builders:") {
            if (tokens.size() > 1) {
                throw ParseError("unexpected tokens after section header", line_no,
                                 tokens[1].col);
            }
            section = head.text == "nodes:" ? Section::nodes
                      : head.text == "arcs:" ? Section::arcs
                                             : Section::builders;
            open_node = nullptr;
            open_arc = nullptr;
            continue;
        }

        if (head.text == "node") {
            if (section != Section::nodes) {
                throw ParseError("'node' outside the nodes: section", line_no, head.col);
            }
            if (tokens.size() != 2) {
                throw ParseError("expected 'node NAME'", line_no, head.col);
            }
            node_blocks.push_back({});
            open_node = &node_blocks.back();
            open_node->name = tokens[1].text;
            open_node->line = line_no;
            continue;
        }
        if (head.text == "arc") {
            if (section != Section::arcs) {
                throw ParseError("'arc' outside the arcs: section", line_no, head.col);
            }
            if (tokens.size() != 4 || tokens[2].text != "->") {
                throw ParseError("expected 'arc FROM -> TO'", line_no, head.col);
            }
            arc_blocks.push_back({});
            open_arc = &arc_blocks.back();
            open_arc->from = tokens[1].text;
            open_arc->to = tokens[3].text;
            open_arc->line = line_no;
            continue;
        }
        if (head.text == "builder") {
            if (section != Section::builders) {
                throw ParseError("'builder' outside the builders: section", line_no,
                                 head.col);
            }
            if (tokens.size() < 2) {
                throw ParseError("expected 'builder KIND key=value ...'", line_no, head.col);
            }
            BuilderStmt stmt;
            stmt.kind = tokens[1].text;
            stmt.line = line_no;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                auto eq = tokens[i].text.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ParseError("expected key=value, got '" + tokens[i].text + "'",
                                     line_no, tokens[i].col);
                }
                stmt.params[tokens[i].text.substr(0, eq)] = tokens[i].text.substr(eq + 1);
            }
            builders.push_back(std::move(stmt));
            continue;
        }

        if (head.text == "labels" || head.text == "observed" || head.text == "expectation" ||
            head.text == "variance") {
            if (!open_node) {
                throw ParseError("'" + head.text + "' outside a node block", line_no,
                                 head.col);
            }
            if (tokens.size() < 2) {
                throw ParseError("'" + head.text + "' needs at least one value", line_no,
                                 head.col);
            }
            if (head.text == "labels") {
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    open_node->labels.push_back(tokens[i].text);
                }
            } else if (head.text == "observed") {
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    open_node->observed.push_back(tokens[i].text);
                }
            } else if (head.text == "expectation") {
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    open_node->expectation.push_back(
                        parse_number(tokens[i].text, line_no, tokens[i].col));
                }
            } else {
                std::vector<double> row;
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    row.push_back(parse_number(tokens[i].text, line_no, tokens[i].col));
                }
                open_node->variance_rows.push_back(std::move(row));
            }
            continue;
        }
        if (head.text == "covariance") {
            if (!open_arc) {
                throw ParseError("'covariance' outside an arc block", line_no, head.col);
            }
            std::vector<double> row;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                row.push_back(parse_number(tokens[i].text, line_no, tokens[i].col));
            }
            if (row.empty()) {
                throw ParseError("'covariance' needs at least one value", line_no, head.col);
            }
            open_arc->rows.push_back(std::move(row));
            continue;
        }
        throw ParseError("unexpected token '" + head.text + "'", line_no, head.col);
    }

    BeliefTree tree;
    for (const auto& b : builders) {
        merge_into(tree, run_builder(b));
    }
    for (const auto& nb : node_blocks) {
        if (nb.labels.empty()) {
            throw ParseError("node '" + nb.name + "' has no labels", nb.line, 1);
        }
        if (nb.expectation.empty()) {
            throw ParseError("node '" + nb.name + "' has no expectation", nb.line, 1);
        }
        BeliefSpec spec;
        spec.expectation = Eigen::Map<const Vector>(nb.expectation.data(),
                                                    static_cast<Index>(nb.expectation.size()));
        spec.variance = rows_to_matrix(nb.variance_rows, nb.line);
        tree.add_node(nb.name, nb.labels, std::move(spec));
        if (!nb.observed.empty()) {
            tree.set_observed(nb.name, nb.observed);
        }
    }
    for (const auto& ab : arc_blocks) {
        tree.add_arc(ab.from, ab.to, rows_to_matrix(ab.rows, ab.line));
    }
    return tree;
}

BeliefTree load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

std::string serialize_model(const BeliefTree& tree) {
    std::ostringstream out;
    out << "# beltree model\n";
    out << "nodes:\n";
    for (const auto& name : tree.node_order()) {
        const BeliefTree::Node& n = tree.node(name);
        out << "  node " << name << "\n";
        out << "    labels";
        for (const auto& l : n.labels) out << " " << l;
        out << "\n";
        if (!n.observed.empty()) {
            out << "    observed";
            for (const auto& l : n.observed) out << " " << l;
            out << "\n";
        }
        out << "    expectation";
        for (Index i = 0; i < n.spec.dim(); ++i) {
            out << " " << format_significant(n.spec.expectation(i), 12);
        }
        out << "\n";
        for (Index i = 0; i < n.spec.dim(); ++i) {
            out << "    variance";
            for (Index j = 0; j < n.spec.dim(); ++j) {
                out << " " << format_significant(n.spec.variance(i, j), 12);
            }
            out << "\n";
        }
    }
    out << "arcs:\n";
    for (const auto& arc : tree.arcs()) {
        out << "  arc " << arc.from << " -> " << arc.to << "\n";
        for (Index i = 0; i < arc.cov.rows(); ++i) {
            out << "    covariance";
            for (Index j = 0; j < arc.cov.cols(); ++j) {
                out << " " << format_significant(arc.cov(i, j), 12);
            }
            out << "\n";
        }
    }
    return out.str();
}

void save_model(const BeliefTree& tree, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << serialize_model(tree);
}

}  // namespace beltree
