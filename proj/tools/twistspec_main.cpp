#include "twistspec/commands.hpp"

int main(int argc, char** argv) { return twistspec::cli::main_entry(argc, argv); }
