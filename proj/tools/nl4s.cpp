#include "nl4s/cli/app.hpp"

int main(int argc, char** argv) { return nl4s::cli::run_cli(argc, argv); }
