#include <string>
#include <vector>

#include "pucci_forge/cli.hpp"

int main(int argc, char** argv) {
  return pucci::main_entry(std::vector<std::string>(argv + 1, argv + argc));
}
