#include "kstw/cli.hpp"

int main(int argc, char** argv) { return kstw::cli::run(argc, argv); }
