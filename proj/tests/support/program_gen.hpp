#pragma once

#include <cstdint>
#include <string>

namespace conpredict::support {

struct GenOptions {
    int functions = 4;
    int max_depth = 2;
    int max_stmts = 3;
    bool concurrency = true;
    bool loops = true;
    bool comments = true;
};

/// A random, valid MiniCC program. Loops are counter-bounded and locks are
/// balanced within one statement list, so the original terminates unless two
/// threads deadlock on nested locks.
std::string random_program(std::uint64_t seed, const GenOptions& options = {});

}  // namespace conpredict::support
