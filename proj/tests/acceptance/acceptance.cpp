// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "spfh/driver.hpp"

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    int failed = 0;
    for (const auto& c : spfh::acceptance_suite(1, only)) {
        std::cout << spfh::format_criterion(c) << std::endl;
        failed += !c.pass;
    }
    std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
