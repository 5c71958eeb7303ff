#include <iostream>
#include <string>
#include <vector>

#include "ct/cli.hpp"
#include "ct/errors.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    ct::CliArgs parsed;
    try {
        parsed = ct::parse_args(args);
    } catch (const ct::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (const ct::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    return ct::cli_main(parsed);
}
