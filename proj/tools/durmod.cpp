#include <cstdio>
int main() { std::puts("durmod cli placeholder"); return 0; }
