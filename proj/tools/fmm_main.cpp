#include "fmm/cli.hpp"

int main(int argc, char** argv) { return fmm::cli::run(argc, argv); }
