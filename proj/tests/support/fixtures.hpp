#pragma once

#include <string>

namespace conpredict::support {

inline std::string data_path(const std::string& rel) { return std::string(CONPREDICT_DATA_DIR) + "/" + rel; }
inline std::string cli_path() { return CONPREDICT_CLI; }

std::string read_text(const std::string& path);

}  // namespace conpredict::support
