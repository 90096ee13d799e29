#include "croc/cli.hpp"

int main(int argc, char** argv) { return croc::cli::run(argc, argv); }
