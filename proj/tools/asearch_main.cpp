#include "asearch/cli.hpp"

int main(int argc, char** argv) { return asearch::run_cli(argc, argv); }
