#include <string>
#include <vector>

#include "dcarl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dcarl::cli::run_cli(args);
}
