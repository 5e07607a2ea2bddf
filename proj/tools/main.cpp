#include "semioscope/cli.hpp"

int main(int argc, char** argv) { return semioscope::run(argc, argv); }
