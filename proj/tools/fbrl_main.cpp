#include "fbrl/harness/cli.hpp"

int main(int argc, char** argv) { return fbrl::run_cli(argc, argv); }
