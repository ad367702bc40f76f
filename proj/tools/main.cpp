#include "cli.hpp"

int main(int argc, char** argv) { return shapeflow::cli::run(argc, argv); }
