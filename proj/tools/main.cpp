#include "biflab/cli.hpp"

int main(int argc, char** argv) { return biflab::cli_dispatch(argc, argv); }
