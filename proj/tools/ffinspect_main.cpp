#include <cstdio>

int main() {
  std::puts("ffinspect: placeholder");
  return 0;
}
