#include "cli.hpp"

int main(int argc, char** argv) { return kmlab::cli::cli_dispatch(argc, argv); }
