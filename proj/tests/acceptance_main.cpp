// Acceptance gate: runs every check in the self-verification suite and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <algorithm>
#include <cstdio>

#include "qchain/verify.hpp"

int main() {
    const std::vector<qchain::CheckResult> results = qchain::run_acceptance_checks();

    bool all_passed = true;
    for (const qchain::CheckResult& check : results) {
        all_passed = all_passed && check.passed;
        std::printf("[%s] %-34s %s\n", check.passed ? "PASS" : "FAIL",
                    check.name.c_str(), check.detail.c_str());
        if (!check.passed) {
            for (const qchain::Metric& m : check.metrics) {
                if (m.passed) continue;
                std::printf("       %s: measured %.12g, expected %.12g, tolerance %.3g\n",
                            m.label.c_str(), m.measured, m.expected, m.tolerance);
            }
        }
    }
    std::printf("%zu/%zu criteria passed\n",
                static_cast<std::size_t>(
                    std::count_if(results.begin(), results.end(),
                                  [](const qchain::CheckResult& c) { return c.passed; })),
                results.size());
    return all_passed ? 0 : 1;
}
