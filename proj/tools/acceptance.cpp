// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--quick] [--seed N]

#include <cstdlib>
#include <iostream>
#include <string>

#include "ctlz/acceptance.hpp"

int main(int argc, char** argv) {
    ctlz::acceptance::Options opt;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--quick") {
            opt.quick = true;
        } else if (a == "--seed" && i + 1 < argc) {
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
        } else {
            std::cerr << "usage: acceptance [--quick] [--seed N]\n";
            return 2;
        }
    }
    int failed = 0;
    ctlz::acceptance::run_all(opt, [&](const ctlz::acceptance::Result& r) {
        std::cout << ctlz::acceptance::format_result(r) << std::endl;
        failed += !r.passed;
    });
    std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
