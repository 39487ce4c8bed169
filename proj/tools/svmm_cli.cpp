#include "svmm/cli.hpp"

int main(int argc, char** argv) { return svmm::cli::main(argc, argv); }
