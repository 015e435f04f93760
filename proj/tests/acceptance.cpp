#include "lgq/lgq.hpp"
int main() { return 1; }
