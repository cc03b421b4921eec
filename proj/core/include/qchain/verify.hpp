#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qchain {

// One measured quantity inside a check. `passed` is the binding verdict;
// for max-deviation metrics it means measured <= tolerance, for range
// metrics |measured - expected| <= tolerance, for lower bounds
// measured >= expected.
struct Metric {
    std::string label;
    double measured;
    double expected;
    double tolerance;
    bool passed;
};

struct CheckResult {
    std::string name;
    bool passed;
    std::vector<Metric> metrics;
    std::string detail;
};

struct VerifyOptions {
    // Deliberately corrupts one recovery operator inside the identity check,
    // so the suite must report a failure. Exists to prove the harness can
    // fail.
    bool inject_fault = false;
    std::uint64_t seed = 20260816;
};

// Runs the full acceptance suite. Every check is deterministic for a fixed
// seed; the Monte Carlo convergence check may reseed once internally.
std::vector<CheckResult> run_acceptance_checks(const VerifyOptions& options = {});

}  // namespace qchain
