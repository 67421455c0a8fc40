#include "conpredict/common/error.hpp"

namespace conpredict {

std::string Diagnostic::str() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
}

namespace {
std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::string text;
    for (const auto& d : diagnostics) {
        if (!text.empty()) text += "\n";
        text += d.str();
    }
    return text.empty() ? std::string("parse error") : text;
}
}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : InputError(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace conpredict
