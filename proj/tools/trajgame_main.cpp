#include "trajgame/cli/cli.hpp"

int main(int argc, char** argv) { return trajgame::run_cli(argc, argv); }
