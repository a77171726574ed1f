#include "dlaim/cli.hpp"

int main(int argc, char** argv) { return dlaim::cli_dispatch(argc, argv); }
