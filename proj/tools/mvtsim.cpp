#include "mvt/cli.hpp"

int main(int argc, char** argv) { return mvt::cli_dispatch(argc, argv); }
