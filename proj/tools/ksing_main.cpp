#include "ksing/cli.hpp"

int main(int argc, char** argv) { return ksing::run_cli(argc, argv); }
