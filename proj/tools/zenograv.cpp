#include "zenograv/cli.hpp"

int main(int argc, char** argv) { return zenograv::cli::main_entry(argc, argv); }
