#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conpredict {

/// Base of every error the library throws. The CLI maps the subclasses onto
/// process exit codes (input errors -> 2, invariant violations -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input: bad files, unknown names, degenerate data.
class InputError : public Error {
public:
    using Error::Error;
};

/// A broken internal invariant. Seeing one of these is a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string message;

    std::string str() const;
};

/// Raised by the MiniCC front end; carries every diagnostic collected.
class ParseError : public InputError {
public:
    explicit ParseError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace conpredict
