#pragma once

#include <cstddef>
#include <vector>

#include "beltree/tree.hpp"

namespace beltree {

/// Linear state-space model: X_t = F theta_t + nu_t,
/// theta_t = G theta_{t-1} + omega_t.
struct DlmSpec {
    std::size_t horizon = 1;
    Matrix obs_map;               // F, q x p
    Matrix state_transition;      // G, p x p
    Vector state1_expectation;    // p
    Matrix state1_variance;       // p x p
    Matrix obs_noise_variance;    // Var(nu), q x q
    Matrix state_noise_variance;  // Var(omega), p x p
};

/// Chain of state nodes theta1..thetaT with each X_t a leaf on theta_t; all
/// moments derived from the model equations.
BeliefTree build_dlm(const DlmSpec& spec);

/// n-step exchangeable collection X_i = M + R_i with cov(R_i, R_j) fixed by
/// |i - j| and zero from lag n on.
struct NStepSpec {
    std::size_t n = 1;
    std::size_t series_count = 1;      // dimension of each X_i and of M
    std::size_t observable_count = 1;  // N
    Matrix mean_variance;              // Var(M), s x s
    std::vector<Matrix> residual_covariances;  // cov(R_i, R_{i+k}) for k = 0..n-1
    Vector mean_expectation;           // empty means zero
};

/// Chain of N-n+2 nodes, each holding the mean block plus a window of n-1
/// observables; overlapping quantities are duplicated under shared labels.
/// With n = 1 every observable attaches directly to the mean node.
BeliefTree build_nstep_chain(const NStepSpec& spec);

}  // namespace beltree
