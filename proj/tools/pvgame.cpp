#include "pvgame/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return pvgame::run_cli(argc, argv, std::cout, std::cerr);
}
