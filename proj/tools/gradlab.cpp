#include "gradlab/cli.hpp"

int main(int argc, char** argv) { return gradlab::cli::main_entry(argc, argv); }
