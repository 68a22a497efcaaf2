#include <vector>
#include <string>

#include "railsched/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return railsched::cli::run(args);
}
