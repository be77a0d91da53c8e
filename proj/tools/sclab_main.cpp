#include "sclab/experiments.hpp"
#include <cstdio>
int main() { return 0; }
