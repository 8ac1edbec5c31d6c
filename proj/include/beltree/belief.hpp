#pragma once

#include <string>

#include "beltree/matrix.hpp"

namespace beltree {

/// Second-order belief specification for one vector of quantities.
struct BeliefSpec {
    Vector expectation;
    Matrix variance;

    Index dim() const { return expectation.size(); }
};

/// Throws unless expectation/variance are finite, consistently sized and the
/// variance is symmetric PSD to tolerance.
void validate_belief_spec(const BeliefSpec& spec, const std::string& context);

/// Oriented cross-covariance between two named blocks; rows index row_block.
struct CrossCov {
    Matrix matrix;
    std::string row_block;
    std::string col_block;
};

/// Projection P (source innovation -> target shift) and resolution transform T
/// (target space -> target space) for one adjustment source.
struct TransformPair {
    Matrix projection;
    Matrix transform;
    std::string source;
    std::string target;
};

/// cov(B,D) Var(D)^+ : the operator updating E[B] from an observation of D.
Matrix projection(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd);

/// cov(B,D) Var(D)^+ cov(D,B) Var(B)^+ : the operator updating Var(B).
Matrix resolution_transform(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd);

/// E[B] + P_D[B] (observed - E[D]).
Vector adjusted_expectation(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd,
                            const Vector& observed);

/// cov(B,C) - cov(B,D) P_D[C]^T. With c == b this is the adjusted variance
/// (I - T_D[B]) Var(B).
Matrix adjusted_covariance(const BeliefSpec& b, const BeliefSpec& c, const BeliefSpec& d,
                           const Matrix& cov_bd, const Matrix& cov_cd, const Matrix& cov_bc);

/// cov(B,C) = cov(B,D) P_D[C]^T when D separates B from C.
Matrix covariance_via_separator(const Matrix& cov_bd, const Matrix& p_dc);

/// (I - T_X[Y]) cov(Y,Z): the arc covariance after adjusting by X, with Y the
/// block nearer the adjustment source.
Matrix update_cross_covariance(const Matrix& t_x_y, const Matrix& cov_yz);

/// P_X[Z] = P_Y[Z] P_X[Y].
Matrix compose_projection(const Matrix& p_yz, const Matrix& p_xy);

/// T_X[Z] = P_Y[Z] T_X[Y] P_Z[Y].
Matrix compose_transform(const Matrix& p_yz, const Matrix& t_xy, const Matrix& p_zy);

/// I - (I - t_partial)(I - t_first): the cumulative transform over two stages.
Matrix accumulate_transform(const Matrix& t_first, const Matrix& t_partial);

}  // namespace beltree
