#include "beltree/belief.hpp"

#include <string>

namespace beltree {

namespace {

void require_shape(bool ok, const std::string& message) {
    if (!ok) throw ShapeError(message);
}

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_cross(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd,
                 const char* op) {
    require_finite(cov_bd, op);
    require_shape(cov_bd.rows() == b.dim() && cov_bd.cols() == d.dim(),
                  std::string(op) + ": cross-covariance is " + dims(cov_bd) +
                      ", expected " + std::to_string(b.dim()) + "x" +
                      std::to_string(d.dim()));
}

}  // namespace

void validate_belief_spec(const BeliefSpec& spec, const std::string& context) {
    if (spec.dim() < 1) {
        throw ShapeError(context + ": belief must cover at least one quantity");
    }
    require_finite(spec.expectation, context.c_str());
    require_finite(spec.variance, context.c_str());
    if (spec.variance.rows() != spec.dim() || spec.variance.cols() != spec.dim()) {
        throw ShapeError(context + ": variance is " + dims(spec.variance) +
                         " but expectation has length " + std::to_string(spec.dim()));
    }
    if (!is_psd(spec.variance)) {
        throw NotPsdError(context + ": variance matrix is not positive semi-definite");
    }
}

Matrix projection(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd) {
    check_cross(b, d, cov_bd, "projection");
    return cov_bd * pseudo_inverse(d.variance);
}

Matrix resolution_transform(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd) {
    check_cross(b, d, cov_bd, "resolution_transform");
    return cov_bd * pseudo_inverse(d.variance) * cov_bd.transpose() *
           pseudo_inverse(b.variance);
}

Vector adjusted_expectation(const BeliefSpec& b, const BeliefSpec& d, const Matrix& cov_bd,
                            const Vector& observed) {
    check_cross(b, d, cov_bd, "adjusted_expectation");
    require_finite(observed, "adjusted_expectation observed");
    require_shape(observed.size() == d.dim(),
                  "adjusted_expectation: observed has length " +
                      std::to_string(observed.size()) + ", expected " +
                      std::to_string(d.dim()));
    return b.expectation + projection(b, d, cov_bd) * (observed - d.expectation);
}

Matrix adjusted_covariance(const BeliefSpec& b, const BeliefSpec& c, const BeliefSpec& d,
                           const Matrix& cov_bd, const Matrix& cov_cd, const Matrix& cov_bc) {
    check_cross(b, d, cov_bd, "adjusted_covariance");
    check_cross(c, d, cov_cd, "adjusted_covariance");
    require_finite(cov_bc, "adjusted_covariance");
    require_shape(cov_bc.rows() == b.dim() && cov_bc.cols() == c.dim(),
                  "adjusted_covariance: cov(B,C) is " + dims(cov_bc) + ", expected " +
                      std::to_string(b.dim()) + "x" + std::to_string(c.dim()));
    return cov_bc - cov_bd * projection(c, d, cov_cd).transpose();
}

Matrix covariance_via_separator(const Matrix& cov_bd, const Matrix& p_dc) {
    require_finite(cov_bd, "covariance_via_separator");
    require_finite(p_dc, "covariance_via_separator");
    if (cov_bd.cols() != p_dc.cols()) {
        throw ShapeError("covariance_via_separator: cov(B,D) is " + dims(cov_bd) +
                         " but P_D[C] is " + dims(p_dc));
    }
    return cov_bd * p_dc.transpose();
}

Matrix update_cross_covariance(const Matrix& t_x_y, const Matrix& cov_yz) {
    require_finite(t_x_y, "update_cross_covariance");
    require_finite(cov_yz, "update_cross_covariance");
    if (t_x_y.rows() != t_x_y.cols() || t_x_y.cols() != cov_yz.rows()) {
        throw ShapeError("update_cross_covariance: transform is " + dims(t_x_y) +
                         " against covariance " + dims(cov_yz));
    }
    return cov_yz - t_x_y * cov_yz;
}

Matrix compose_projection(const Matrix& p_yz, const Matrix& p_xy) {
    require_finite(p_yz, "compose_projection");
    require_finite(p_xy, "compose_projection");
    if (p_yz.cols() != p_xy.rows()) {
        throw ShapeError("compose_projection: inner dimensions " + dims(p_yz) + " * " +
                         dims(p_xy) + " do not agree");
    }
    return p_yz * p_xy;
}

Matrix compose_transform(const Matrix& p_yz, const Matrix& t_xy, const Matrix& p_zy) {
    require_finite(p_yz, "compose_transform");
    require_finite(t_xy, "compose_transform");
    require_finite(p_zy, "compose_transform");
    if (p_yz.cols() != t_xy.rows() || t_xy.rows() != t_xy.cols() ||
        t_xy.cols() != p_zy.rows() || p_zy.cols() != p_yz.rows()) {
        throw ShapeError("compose_transform: shapes " + dims(p_yz) + " * " + dims(t_xy) +
                         " * " + dims(p_zy) + " do not chain");
    }
    return p_yz * t_xy * p_zy;
}

Matrix accumulate_transform(const Matrix& t_first, const Matrix& t_partial) {
    require_finite(t_first, "accumulate_transform");
    require_finite(t_partial, "accumulate_transform");
    if (t_first.rows() != t_first.cols() || t_partial.rows() != t_partial.cols() ||
        t_first.rows() != t_partial.rows()) {
        throw ShapeError("accumulate_transform: incompatible shapes " + dims(t_first) +
                         " and " + dims(t_partial));
    }
    const Matrix id = Matrix::Identity(t_first.rows(), t_first.cols());
    return id - (id - t_partial) * (id - t_first);
}

}  // namespace beltree
