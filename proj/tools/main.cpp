#include "morrey/cli.hpp"

int main(int argc, char** argv) { return morrey::run_cli(argc, argv); }
