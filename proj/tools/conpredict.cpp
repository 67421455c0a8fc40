#include "conpredict/cli/cli.hpp"

int main(int argc, char** argv) { return conpredict::cli::run(argc, argv); }
