#include "cli.hpp"

int main(int argc, char** argv) { return plvote::cli::cli_main(argc, argv); }
