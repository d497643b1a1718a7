#include "cli.hpp"

int main(int argc, char** argv) { return admd::cli::run(argc, argv); }
