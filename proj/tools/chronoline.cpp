#include <string>
#include <vector>

#include "chronoline/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chronoline::cli::run(args);
}
