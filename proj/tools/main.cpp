#include "probesched/cli.hpp"

int main(int argc, char** argv) { return probesched::run_cli(argc, argv); }
