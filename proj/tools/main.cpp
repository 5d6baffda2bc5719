#include "glyphforge/cli.hpp"

int main(int argc, char** argv) { return glyphforge::cli::run(argc, argv); }
