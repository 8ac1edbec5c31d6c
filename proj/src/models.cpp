#include "beltree/models.hpp"

#include <string>

namespace beltree {

namespace {

std::vector<std::string> indexed_labels(const std::string& base, Index dim) {
    if (dim == 1) return {base};
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(dim));
    for (Index i = 1; i <= dim; ++i) {
        labels.push_back(base + "." + std::to_string(i));
    }
    return labels;
}

}  // namespace

BeliefTree build_dlm(const DlmSpec& spec) {
    if (spec.horizon < 1) throw ShapeError("dlm horizon must be at least 1");
    const Index p = spec.state_transition.rows();
    const Index q = spec.obs_map.rows();
    if (p < 1 || spec.state_transition.cols() != p) {
        throw ShapeError("state transition must be square and non-empty");
    }
    if (q < 1 || spec.obs_map.cols() != p) {
        throw ShapeError("observation map must be q x p with p matching the transition");
    }
    if (spec.state1_expectation.size() != p || spec.state1_variance.rows() != p ||
        spec.state1_variance.cols() != p) {
        throw ShapeError("initial state moments do not match the state dimension");
    }
    if (spec.obs_noise_variance.rows() != q || spec.obs_noise_variance.cols() != q) {
        throw ShapeError("observation noise variance must be q x q");
    }
    if (spec.state_noise_variance.rows() != p || spec.state_noise_variance.cols() != p) {
        throw ShapeError("state noise variance must be p x p");
    }
    for (const Matrix* m : {&spec.state1_variance, &spec.obs_noise_variance,
                            &spec.state_noise_variance}) {
        require_finite(*m, "dlm variance");
        if (!is_psd(*m)) throw NotPsdError("dlm variance matrices must be PSD");
    }
    require_finite(spec.obs_map, "dlm observation map");
    require_finite(spec.state_transition, "dlm state transition");
    require_finite(spec.state1_expectation, "dlm initial expectation");

    const Matrix& g = spec.state_transition;
    const Matrix& f = spec.obs_map;

    BeliefTree tree;
    Vector e_state = spec.state1_expectation;
    Matrix v_state = symmetrize(spec.state1_variance);
    for (std::size_t t = 1; t <= spec.horizon; ++t) {
        if (t > 1) {
            e_state = g * e_state;
            v_state = symmetrize(g * v_state * g.transpose() + spec.state_noise_variance);
        }
        const std::string state_name = "theta" + std::to_string(t);
        const std::string obs_name = "X" + std::to_string(t);
        tree.add_node(state_name, indexed_labels(state_name, p), {e_state, v_state});
        tree.add_node(obs_name, indexed_labels(obs_name, q),
                      {f * e_state,
                       symmetrize(f * v_state * f.transpose() + spec.obs_noise_variance)});
        tree.add_arc(obs_name, state_name, f * v_state);  // rows index X_t
        if (t > 1) {
            const std::string prev = "theta" + std::to_string(t - 1);
            // cov(theta_{t-1}, theta_t) = V_{t-1} G^T; v_state here is V_t, so
            // recompute from the predecessor's stored variance
            tree.add_arc(prev, state_name,
                         tree.node(prev).spec.variance * g.transpose());
        }
    }
    return tree;
}

BeliefTree build_nstep_chain(const NStepSpec& spec) {
    const std::size_t n = spec.n;
    const std::size_t s = spec.series_count;
    const std::size_t N = spec.observable_count;
    if (n < 1 || s < 1) throw ShapeError("n and series count must be at least 1");
    if (N < n) {
        throw ShapeError("observable count " + std::to_string(N) +
                         " must be at least the step count " + std::to_string(n));
    }
    const Index si = static_cast<Index>(s);
    if (spec.mean_variance.rows() != si || spec.mean_variance.cols() != si) {
        throw ShapeError("mean variance must be s x s");
    }
    require_finite(spec.mean_variance, "mean variance");
    if (!is_psd(spec.mean_variance)) throw NotPsdError("mean variance must be PSD");
    if (spec.residual_covariances.size() != n) {
        throw ShapeError("expected " + std::to_string(n) +
                         " residual covariances (lags 0.." + std::to_string(n - 1) +
                         "), got " + std::to_string(spec.residual_covariances.size()));
    }
    for (const Matrix& c : spec.residual_covariances) {
        require_finite(c, "residual covariance");
        if (c.rows() != si || c.cols() != si) {
            throw ShapeError("residual covariances must be s x s");
        }
        if ((c - c.transpose()).cwiseAbs().maxCoeff() >
            1e-12 * std::max(1.0, c.cwiseAbs().maxCoeff())) {
            throw ShapeError("residual covariances must be symmetric "
                             "(reflection invariance)");
        }
    }
    Vector mean = spec.mean_expectation;
    if (mean.size() == 0) mean = Vector::Zero(si);
    if (mean.size() != si) throw ShapeError("mean expectation must have length s");
    require_finite(mean, "mean expectation");

    const Matrix& v = spec.mean_variance;
    auto cov_xx = [&](std::size_t a, std::size_t b) -> Matrix {
        const std::size_t lag = a > b ? a - b : b - a;
        if (lag >= n) return v;
        // residual lag matrices are symmetric, so orientation does not matter
        return v + spec.residual_covariances[lag];
    };

    const std::vector<std::string> mean_labels = indexed_labels("M", si);

    BeliefTree tree;
    if (n == 1) {
        tree.add_node("B1", mean_labels, {mean, v});
        for (std::size_t t = 1; t <= N; ++t) {
            const std::string name = "B" + std::to_string(t + 1);
            tree.add_node(name, indexed_labels("X" + std::to_string(t), si),
                          {mean, symmetrize(cov_xx(t, t))});
            tree.add_arc("B1", name, v);  // cov(M, X_t)
        }
        return tree;
    }

    const std::size_t window = n - 1;       // observables per node
    const std::size_t node_count = N - n + 2;
    const Index dim = static_cast<Index>(s * n);

    auto node_moments = [&](std::size_t start) {
        Vector e(dim);
        Matrix vv(dim, dim);
        e.segment(0, si) = mean;
        vv.block(0, 0, si, si) = v;
        for (std::size_t a = 0; a < window; ++a) {
            const Index ra = si * static_cast<Index>(1 + a);
            e.segment(ra, si) = mean;
            vv.block(0, ra, si, si) = v;
            vv.block(ra, 0, si, si) = v;
            for (std::size_t b = 0; b < window; ++b) {
                vv.block(ra, si * static_cast<Index>(1 + b), si, si) =
                    cov_xx(start + a, start + b);
            }
        }
        return BeliefSpec{std::move(e), symmetrize(vv)};
    };

    for (std::size_t i = 1; i <= node_count; ++i) {
        std::vector<std::string> labels = mean_labels;
        for (std::size_t a = 0; a < window; ++a) {
            auto xs = indexed_labels("X" + std::to_string(i + a), si);
            labels.insert(labels.end(), xs.begin(), xs.end());
        }
        tree.add_node("B" + std::to_string(i), std::move(labels), node_moments(i));
    }
    for (std::size_t i = 1; i + 1 <= node_count; ++i) {
        // rows index node i quantities {M, X_i..X_{i+w-1}},
        // cols index node i+1 quantities {M, X_{i+1}..X_{i+w}}
        Matrix cov(dim, dim);
        cov.block(0, 0, si, si) = v;
        for (std::size_t b = 0; b < window; ++b) {
            cov.block(0, si * static_cast<Index>(1 + b), si, si) = v;
        }
        for (std::size_t a = 0; a < window; ++a) {
            const Index ra = si * static_cast<Index>(1 + a);
            cov.block(ra, 0, si, si) = v;
            for (std::size_t b = 0; b < window; ++b) {
                cov.block(ra, si * static_cast<Index>(1 + b), si, si) =
                    cov_xx(i + a, i + 1 + b);
            }
        }
        tree.add_arc("B" + std::to_string(i), "B" + std::to_string(i + 1), cov);
    }
    return tree;
}

}  // namespace beltree
