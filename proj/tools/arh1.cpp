#include "arh/cli.hpp"

int main(int argc, char** argv) {
  return arh::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
