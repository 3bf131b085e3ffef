#include "levyhom/cli.hpp"

int main(int argc, char** argv) { return levyhom::run_cli(argc, argv); }
