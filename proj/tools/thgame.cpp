#include <iostream>

#include "thgame/cli.hpp"

int main(int argc, char** argv)
{
    return thgame::cli_dispatch(argc, argv, std::cout, std::cerr);
}
