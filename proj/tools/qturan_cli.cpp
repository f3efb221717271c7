#include "qturan/qturan.hpp"
int main() { return 0; }
