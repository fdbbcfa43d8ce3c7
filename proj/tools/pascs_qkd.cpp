#include "pascs_qkd/cli.hpp"

#include <iostream>
#include <variant>

int main(int argc, char** argv) {
    auto parsed = pascs::cli::parse_command_line(argc, argv, std::cout, std::cerr);
    if (const int* status = std::get_if<int>(&parsed)) return *status;
    return pascs::cli::run(std::get<pascs::cli::RunConfig>(parsed), std::cout, std::cerr);
}
