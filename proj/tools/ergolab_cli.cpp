#include "ergolab/ergolab.hpp"

int main(int argc, char** argv) { return ergolab::cli_main(argc, argv); }
