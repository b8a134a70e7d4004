#include <iostream>
#include <string>
#include <vector>

#include "probelens/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return probelens::cli::run(args, {std::cout, std::cerr}, probelens::cli::Env::process());
}
