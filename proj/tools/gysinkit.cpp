#include "gysinkit/cli/commands.hpp"

#include <exception>
#include <iostream>

int main(int argc, char** argv)
{
    try {
        return gysinkit::cli::run(argc, argv, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gysinkit::cli::kExitCheckFailed;
    }
}
