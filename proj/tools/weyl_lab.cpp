#include <cstdio>

int main() {
  std::puts("weyl-lab: placeholder");
  return 0;
}
