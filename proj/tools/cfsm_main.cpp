#include <cstdio>

int main() {
  std::fprintf(stderr, "cfsm: not implemented yet\n");
  return 3;
}
