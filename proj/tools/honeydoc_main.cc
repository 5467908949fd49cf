#include <iostream>

#include "honeydoc/harness/cli.h"

int main(int argc, char** argv) {
  return honeydoc::harness::RunCli(argc, argv, std::cout, std::cerr);
}
