#include <iostream>
#include <puffer/cli.hpp>

int main(int argc, char** argv)
{
    return puffer::cli::main_entry(argc, argv, std::cout, std::cerr);
}
