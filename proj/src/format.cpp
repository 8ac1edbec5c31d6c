#include "beltree/format.hpp"

#include <cstdio>

namespace beltree {

std::string format_significant(double value, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, value);
    return buf;
}

std::string format_matrix(const Matrix& m, int significant) {
    std::string out = "[";
    for (Index i = 0; i < m.rows(); ++i) {
        if (i > 0) out += "; ";
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += " ";
            out += format_significant(m(i, j), significant);
        }
    }
    out += "]";
    return out;
}

std::string format_vector(const Vector& v, int significant) {
    std::string out = "[";
    for (Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += " ";
        out += format_significant(v(i), significant);
    }
    out += "]";
    return out;
}

}  // namespace beltree
