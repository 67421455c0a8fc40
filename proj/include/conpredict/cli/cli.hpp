#pragma once

namespace conpredict::cli {

/// Runs the command-line tool. Returns the process exit code.
int run(int argc, char** argv);

}  // namespace conpredict::cli
