#include <string>
#include <vector>

#include "gia/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gia::cli::run(args);
}
