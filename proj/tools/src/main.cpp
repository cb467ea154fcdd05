#include <iostream>

#include "wavenet/cli/dispatch.hpp"

int main(int argc, char** argv) { return wavenet::cli::dispatch(argc, argv, std::cout, std::cerr); }
