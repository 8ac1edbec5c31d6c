#pragma once

#include <string>

#include "beltree/matrix.hpp"

namespace beltree {

/// %g-style rendering with the given number of significant digits.
std::string format_significant(double value, int significant);

/// "[a b; c d]" rows separated by ';'.
std::string format_matrix(const Matrix& m, int significant);

/// "[a b c]".
std::string format_vector(const Vector& v, int significant);

}  // namespace beltree
