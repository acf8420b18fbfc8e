#include <string>
#include <vector>

#include "rlvr/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return rlvr::run_cli(args);
}
