#include "botsim/cli.hpp"
int main(int argc, char** argv) { return botsim::run_cli(argc, argv); }
