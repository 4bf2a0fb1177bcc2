#include "cli_app.hpp"

int main(int argc, char** argv) { return gbdp_cli::run(argc, argv); }
