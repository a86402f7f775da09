#include <iostream>

#include "minismt/smtlib.hpp"

// SMT-LIB v2 solver for quantified linear Int/Real arithmetic, reading
// commands from stdin. Used as the default backend of the synthesis
// pipeline; any SMT-LIB compliant solver can replace it via --solver.
int main() {
  std::ios::sync_with_stdio(false);
  return minismt::run_smtlib(std::cin, std::cout);
}
