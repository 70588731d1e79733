#include "wsc/cli.hpp"

int main(int argc, char** argv) { return wsc::cli_main(argc, argv); }
