#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conpredict::support {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace conpredict::support
