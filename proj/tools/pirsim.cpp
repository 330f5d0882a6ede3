#include "pirsim/experiments.hpp"

int main(int argc, char** argv) { return pirsim::run_cli(argc, argv); }
