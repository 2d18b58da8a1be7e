#include "monoprox/cli.hpp"

int main(int argc, char** argv) { return monoprox::run_cli(argc, argv); }
