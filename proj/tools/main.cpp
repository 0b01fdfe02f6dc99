#include "fastlyap/cli.hpp"

int main(int argc, char** argv) { return fastlyap::cli::run(argc, argv); }
