#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scanviz::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one scanviz invocation. args excludes the program name.
/// Returns 0 on success, 1 on a module failure (one "error: ..." line on err), 2 on bad flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace scanviz::cli
