#include "ccgm/cli/commands.hpp"

int main(int argc, char** argv) { return ccgm::cli::run(std::vector<std::string>(argv + 1, argv + argc)); }
