#include <cstdlib>
#include <iostream>

#include <unistd.h>

#include "pqfi_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  pqfi::cli::Environment env;
  env.color = std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO) == 1;
  return pqfi::cli::run(args, std::cout, std::cerr, env);
}
