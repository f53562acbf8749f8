#include <string>
#include <vector>

#include "bmr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bmr::run_command(args);
}
