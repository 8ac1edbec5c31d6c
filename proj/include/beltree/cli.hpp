#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace beltree::cli {

/// Runs the command-line front end. Exit status: 0 ok, 1 domain error,
/// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beltree::cli
