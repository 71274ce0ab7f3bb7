#include "mcflab/cli.hpp"

int main(int argc, char** argv)
{
    return mcflab::cli::run(argc, argv);
}
