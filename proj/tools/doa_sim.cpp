#include "doa/harness.hpp"

int main(int argc, char** argv) { return doa::cli_main(argc, argv); }
