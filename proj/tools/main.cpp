#include <iostream>

#include "adcad/cli.hpp"

int main(int argc, char** argv) { return adcad::dispatch(argc, argv, std::cout, std::cerr); }
