#include "cli.hpp"

int main(int argc, char** argv) { return dronefleet::run_cli(argc, argv); }
