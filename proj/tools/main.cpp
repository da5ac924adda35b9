#include "commands.hpp"

int main(int argc, char** argv) { return wntorus::cli::run(argc, argv); }
