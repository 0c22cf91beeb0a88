#include "utilisvm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return utilisvm::cli::run(args);
}
