#include "koopman_sp/cli.hpp"

int main(int argc, char** argv) { return koopman_sp::cli::run(argc, argv); }
