#include "chabauty/acceptance.hpp"

#include <cstdlib>
#include <iostream>

// Runs every acceptance criterion and prints one line per criterion.
int main(int argc, char **argv) {
    std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2026;
    auto results = chabauty::run_acceptance(seed, std::thread::hardware_concurrency(), &std::cout);
    bool all = true;
    for (const auto &r : results) {
        std::cout << chabauty::format_result(r) << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
