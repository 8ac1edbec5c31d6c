#include "beltree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <map>
#include <ostream>

#include "beltree/diagnostics.hpp"
#include "beltree/format.hpp"
#include "beltree/joint.hpp"
#include "beltree/model_io.hpp"
#include "beltree/models.hpp"
#include "beltree/propagate.hpp"

namespace beltree::cli {

namespace {

using nlohmann::json;

BeliefTree load_valid_model(const std::string& path) {
    BeliefTree tree = load_model(path);
    ValidationReport report = tree.validate();
    if (!report.valid()) {
        std::string first;
        for (const auto& f : report.findings) {
            if (f.severity == ValidationFinding::Severity::error) {
                first = f.message;
                break;
            }
        }
        throw InvalidModelError("model '" + path + "' failed validation: " + first);
    }
    return tree;
}

// NODE=v1,v2  or  NODE[l1,l2]=v1,v2
Observation parse_observation_spec(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ParseError("observation must look like NODE=value[,value...]", 1, 1);
    }
    std::string lhs = text.substr(0, eq);
    std::string rhs = text.substr(eq + 1);
    Observation obs;
    auto open = lhs.find('[');
    if (open != std::string::npos) {
        if (lhs.back() != ']') {
            throw ParseError("unterminated label selection in '" + text + "'", 1,
                             static_cast<int>(open) + 1);
        }
        std::string inside = lhs.substr(open + 1, lhs.size() - open - 2);
        obs.node.name = lhs.substr(0, open);
        std::vector<std::string> labels;
        std::string current;
        for (char c : inside + ",") {
            if (c == ',') {
                if (!current.empty()) labels.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (labels.empty()) {
            throw ParseError("empty label selection in '" + text + "'", 1, 1);
        }
        obs.node.selection = std::move(labels);
    } else {
        obs.node.name = lhs;
    }
    obs.values = parse_vector_literal(rhs);
    return obs;
}

std::vector<std::string> observed_labels(const BeliefTree& tree, const NodeRef& ref) {
    if (ref.selection) return *ref.selection;
    return tree.node(ref.name).labels;
}

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> widths;
    for (const auto& row : cells) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) {
                line.append(widths[i] + 2 - row[i].size(), ' ');
            }
        }
        out << line << "\n";
    }
}

struct CommonFlags {
    bool json_out = false;
    bool precise = false;

    int digits() const { return precise ? 12 : 3; }
};

int cmd_validate(const std::string& path, const CommonFlags& flags, std::ostream& out) {
    BeliefTree tree = load_model(path);
    ValidationReport report = tree.validate();
    if (flags.json_out) {
        json j;
        j["valid"] = report.valid();
        j["nodes"] = report.node_count;
        j["arcs"] = report.arc_count;
        j["components"] = report.component_count;
        j["findings"] = json::array();
        for (const auto& f : report.findings) {
            j["findings"].push_back(
                {{"severity",
                  f.severity == ValidationFinding::Severity::error ? "error" : "info"},
                 {"code", f.code},
                 {"message", f.message}});
        }
        out << j.dump(2) << "\n";
    } else {
        out << "model: " << report.node_count << " nodes, " << report.arc_count
            << " arcs, " << report.component_count << " components\n";
        for (const auto& f : report.findings) {
            out << (f.severity == ValidationFinding::Severity::error ? "error" : "info")
                << ": " << f.code << ": " << f.message << "\n";
        }
        out << (report.valid() ? "valid" : "invalid") << "\n";
    }
    return report.valid() ? 0 : 1;
}

int cmd_adjust(const std::string& path, const std::string& node_name,
               const std::vector<std::string>& labels, const std::vector<double>& values,
               bool do_prune, bool verify_oracle, const std::string& out_path,
               const CommonFlags& flags, std::ostream& out) {
    BeliefTree tree = load_valid_model(path);
    NodeRef ref{node_name, labels.empty()
                              ? std::nullopt
                              : std::optional<std::vector<std::string>>(labels)};
    Observation obs{ref, Eigen::Map<const Vector>(values.data(),
                                                  static_cast<Index>(values.size()))};

    std::map<std::string, double> prior_traces;
    for (const auto& name : tree.node_order()) {
        prior_traces[name] = tree.node(name).spec.variance.trace();
    }

    AdjustmentPlan plan = propagate_transforms(tree, ref);
    std::map<std::string, double> resolutions;
    for (const auto& [name, tp] : plan.transforms) {
        resolutions[name] = tp.transform.trace();
    }

    JointBelief oracle_posterior;
    if (verify_oracle) {
        oracle_posterior =
            global_adjust(assemble_joint(tree), observed_labels(tree, ref), obs.values);
    }

    apply_observation(tree, plan, obs);

    double deviation = 0.0;
    if (verify_oracle) {
        deviation = compare_against_joint(tree, oracle_posterior);
    }
    if (do_prune) {
        prune(tree, ref);
    }

    const int digits = flags.digits();
    if (flags.json_out) {
        json j;
        j["observed"] = {{"node", node_name}, {"values", json(values)}};
        if (!labels.empty()) j["observed"]["labels"] = json(labels);
        j["nodes"] = json::object();
        for (const auto& name : tree.node_order()) {
            const BeliefTree::Node& n = tree.node(name);
            json entry;
            entry["prior_trace"] = prior_traces.at(name);
            entry["resolution"] = resolutions.count(name) ? resolutions.at(name) : 0.0;
            entry["expectation"] = vector_to_json(n.spec.expectation);
            entry["variance"] = matrix_to_json(n.spec.variance);
            j["nodes"][name] = entry;
        }
        if (verify_oracle) j["oracle_max_deviation"] = deviation;
        out << j.dump(2) << "\n";
    } else {
        out << "adjusted by " << node_name << " = "
            << format_vector(obs.values, digits) << "\n";
        std::vector<std::vector<std::string>> cells;
        cells.push_back({"node", "prior.trace", "resolution", "expectation", "variance"});
        for (const auto& name : tree.node_order()) {
            const BeliefTree::Node& n = tree.node(name);
            cells.push_back({name, format_significant(prior_traces.at(name), digits),
                             format_significant(
                                 resolutions.count(name) ? resolutions.at(name) : 0.0,
                                 digits),
                             format_vector(n.spec.expectation, digits),
                             format_matrix(n.spec.variance, digits)});
        }
        print_table(out, cells);
        if (verify_oracle) {
            out << "oracle max deviation: " << format_significant(deviation, 3) << "\n";
        }
    }
    if (!out_path.empty()) {
        save_model(tree, out_path);
    }
    return 0;
}

int cmd_diagnose(const std::string& path, const std::string& target,
                 const std::vector<std::string>& observe_specs, bool prune_observed,
                 const CommonFlags& flags, std::ostream& out) {
    BeliefTree tree = load_valid_model(path);
    DiagnosticSnapshot cumulative = open_snapshot(tree, target);

    std::vector<DiagnosticRow> rows;
    json stages = json::array();
    int stage_no = 0;
    for (const auto& spec_text : observe_specs) {
        Observation obs = parse_observation_spec(spec_text);
        ++stage_no;
        DiagnosticSnapshot stage = open_snapshot(tree, target);
        AdjustmentPlan plan = propagate_transforms(tree, obs.node);
        Matrix t_target = plan.transforms.count(target)
                              ? plan.transforms.at(target).transform
                              : Matrix::Zero(cumulative.prior_expectation.size(),
                                             cumulative.prior_expectation.size());
        stage = advance_snapshot(std::move(stage), t_target);
        cumulative = advance_snapshot(std::move(cumulative), t_target);
        apply_observation(tree, plan, obs);
        if (prune_observed) {
            prune(tree, obs.node);
        }
        DiagnosticReport report = bearing(stage, tree);
        DiagnosticLevel level = flag_size_ratio(report);
        rows.push_back({std::to_string(stage_no) + ": " + spec_text, report, level});
        if (flags.json_out) {
            stages.push_back({{"stage", spec_text},
                              {"bearing", vector_to_json(report.bearing_coordinates)},
                              {"size", report.size},
                              {"expected_size", report.expected_size},
                              {"size_ratio", report.size_ratio},
                              {"flag", to_string(level)}});
        }
    }

    if (observe_specs.empty()) {
        if (flags.json_out) {
            out << json({{"target", target}, {"stages", json::array()}}).dump(2) << "\n";
        }
        return 0;
    }

    DiagnosticReport cum_report = bearing(cumulative, tree);
    DiagnosticLevel cum_level = flag_size_ratio(cum_report);
    rows.push_back({"cumulative", cum_report, cum_level});

    if (flags.json_out) {
        json j;
        j["target"] = target;
        j["stages"] = stages;
        j["cumulative"] = {{"bearing", vector_to_json(cum_report.bearing_coordinates)},
                           {"size", cum_report.size},
                           {"expected_size", cum_report.expected_size},
                           {"size_ratio", cum_report.size_ratio},
                           {"flag", to_string(cum_level)}};
        out << j.dump(2) << "\n";
    } else {
        out << "diagnostics for " << target << "\n";
        out << render_diagnostic_table(rows, flags.digits());
    }
    return 0;
}

int cmd_build_report(const BeliefTree& tree, const std::string& kind,
                     const std::string& out_path, const CommonFlags& flags,
                     std::ostream& out) {
    ValidationReport report = tree.validate();
    if (!report.valid()) {
        throw InvalidModelError("built " + kind + " model failed validation");
    }
    save_model(tree, out_path);
    if (flags.json_out) {
        out << json({{"kind", kind},
                     {"nodes", report.node_count},
                     {"arcs", report.arc_count},
                     {"path", out_path}})
                   .dump(2)
            << "\n";
    } else {
        out << "built " << kind << " model: " << report.node_count << " nodes, "
            << report.arc_count << " arcs -> " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"local computation over Bayes linear belief networks"};
    app.require_subcommand(1);

    int rc = 0;

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a model file");
    std::string v_path;
    CommonFlags v_flags;
    validate_cmd->add_option("path", v_path, "model file")->required();
    validate_cmd->add_flag("--json-out", v_flags.json_out, "structured output");
    validate_cmd->callback([&] { rc = cmd_validate(v_path, v_flags, out); });

    // adjust
    auto* adjust_cmd = app.add_subcommand("adjust", "observe one node and propagate");
    std::string a_path, a_node, a_out;
    std::vector<std::string> a_labels;
    std::vector<double> a_values;
    bool a_prune = false, a_verify = false;
    CommonFlags a_flags;
    adjust_cmd->add_option("path", a_path, "model file")->required();
    adjust_cmd->add_option("--node", a_node, "node to observe")->required();
    adjust_cmd->add_option("--values", a_values, "observed values")
        ->required()
        ->delimiter(',');
    adjust_cmd->add_option("--labels", a_labels, "labels observed (default: all)")
        ->delimiter(',');
    adjust_cmd->add_flag("--prune", a_prune, "prune the observed node afterwards");
    adjust_cmd->add_flag("--verify-oracle", a_verify,
                         "compare against the dense joint adjustment");
    adjust_cmd->add_flag("--json-out", a_flags.json_out, "structured output");
    adjust_cmd->add_flag("--precise", a_flags.precise, "full precision output");
    adjust_cmd->add_option("--out", a_out, "write the updated model here");
    adjust_cmd->callback([&] {
        rc = cmd_adjust(a_path, a_node, a_labels, a_values, a_prune, a_verify, a_out,
                        a_flags, out);
    });

    // diagnose
    auto* diag_cmd = app.add_subcommand("diagnose", "bearing/size diagnostics for a node");
    std::string d_path, d_target;
    std::vector<std::string> d_observe;
    bool d_prune = false;
    CommonFlags d_flags;
    diag_cmd->add_option("path", d_path, "model file")->required();
    diag_cmd->add_option("--target", d_target, "node to diagnose")->required();
    diag_cmd->add_option("--observe", d_observe,
                         "observation NODE=v[,v...] or NODE[l1,l2]=v1,v2; repeatable");
    diag_cmd->add_flag("--prune-observed", d_prune, "prune each node after observing");
    diag_cmd->add_flag("--json-out", d_flags.json_out, "structured output");
    diag_cmd->add_flag("--precise", d_flags.precise, "full precision output");
    diag_cmd->callback(
        [&] { rc = cmd_diagnose(d_path, d_target, d_observe, d_prune, d_flags, out); });

    // build
    auto* build_cmd = app.add_subcommand("build", "generate a model file");
    build_cmd->require_subcommand(1);

    auto* dlm_cmd = build_cmd->add_subcommand("dlm", "dynamic linear model chain");
    std::size_t b_horizon = 1;
    std::string b_f, b_g, b_e1, b_v1, b_vnu, b_vomega, b_dlm_out;
    CommonFlags b_dlm_flags;
    dlm_cmd->add_option("--horizon", b_horizon, "number of time steps")->required();
    dlm_cmd->add_option("--obs-map", b_f, "F matrix literal")->required();
    dlm_cmd->add_option("--state-transition", b_g, "G matrix literal")->required();
    dlm_cmd->add_option("--state1-expectation", b_e1, "E[theta1]")->required();
    dlm_cmd->add_option("--state1-variance", b_v1, "Var(theta1)")->required();
    dlm_cmd->add_option("--obs-noise", b_vnu, "Var(nu)")->required();
    dlm_cmd->add_option("--state-noise", b_vomega, "Var(omega)")->required();
    dlm_cmd->add_option("--out", b_dlm_out, "output model file")->required();
    dlm_cmd->add_flag("--json-out", b_dlm_flags.json_out, "structured output");
    dlm_cmd->callback([&] {
        DlmSpec spec;
        spec.horizon = b_horizon;
        spec.obs_map = parse_matrix_literal(b_f);
        spec.state_transition = parse_matrix_literal(b_g);
        spec.state1_expectation = parse_vector_literal(b_e1);
        spec.state1_variance = parse_matrix_literal(b_v1);
        spec.obs_noise_variance = parse_matrix_literal(b_vnu);
        spec.state_noise_variance = parse_matrix_literal(b_vomega);
        rc = cmd_build_report(build_dlm(spec), "dlm", b_dlm_out, b_dlm_flags, out);
    });

    auto* nstep_cmd = build_cmd->add_subcommand("nstep", "n-step exchangeable chain");
    std::size_t b_n = 1, b_series = 1, b_obs = 1;
    std::string b_mean_var, b_mean_exp, b_nstep_out;
    std::vector<std::string> b_residuals;
    CommonFlags b_nstep_flags;
    nstep_cmd->add_option("--n", b_n, "step count")->required();
    nstep_cmd->add_option("--series", b_series, "series per observable (default 1)");
    nstep_cmd->add_option("--N,--observables", b_obs, "number of observables")->required();
    nstep_cmd->add_option("--mean-variance", b_mean_var, "Var(M) literal")->required();
    nstep_cmd
        ->add_option("--residual", b_residuals,
                     "cov(R_i, R_{i+k}) literals for k = 0..n-1, in order")
        ->required();
    nstep_cmd->add_option("--mean-expectation", b_mean_exp, "E[M] (default zero)");
    nstep_cmd->add_option("--out", b_nstep_out, "output model file")->required();
    nstep_cmd->add_flag("--json-out", b_nstep_flags.json_out, "structured output");
    nstep_cmd->callback([&] {
        NStepSpec spec;
        spec.n = b_n;
        spec.series_count = b_series;
        spec.observable_count = b_obs;
        spec.mean_variance = parse_matrix_literal(b_mean_var);
        for (const auto& r : b_residuals) {
            spec.residual_covariances.push_back(parse_matrix_literal(r));
        }
        if (!b_mean_exp.empty()) {
            spec.mean_expectation = parse_vector_literal(b_mean_exp);
        }
        rc = cmd_build_report(build_nstep_chain(spec), "nstep", b_nstep_out, b_nstep_flags,
                              out);
    });

    std::vector<const char*> argv;
    argv.push_back("beltree");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    }
    return rc;
}

}  // namespace beltree::cli
