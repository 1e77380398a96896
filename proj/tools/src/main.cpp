#include "pv5cli/app.hpp"

int main(int argc, char** argv) { return pv5::cli::main_entry(argc, argv); }
