#include "hofer/cli.hpp"

int main(int argc, char** argv) { return hofer::cli::run(argc, argv); }
