#include <iostream>

#include <glwords/glwords.hpp>

int main(int argc, char** argv) {
  return glwords::run_cli(argc, argv, std::cout, std::cerr);
}
