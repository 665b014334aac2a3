#include "cli.hpp"

int main(int argc, char** argv) { return peerlex::cli::run(argc, argv); }
