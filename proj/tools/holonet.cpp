#include <iostream>

#include "holonet/cli.hpp"

int main(int argc, char** argv)
{
    return holonet::run_cli(argc, argv, std::cout, std::cerr);
}
