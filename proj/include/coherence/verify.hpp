#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coherence/rng.hpp"

namespace coherence::verify {

struct CaseRecord {
    std::size_t index = 0;
    bool passed = false;
    double deviation = 0.0;
    std::string note;
};

struct SuiteResult {
    std::string suite;
    std::size_t cases_run = 0;
    std::size_t cases_passed = 0;
    double worst_deviation = 0.0;
    std::vector<CaseRecord> details;

    bool all_passed() const { return cases_passed == cases_run; }
};

struct SuiteConfig {
    std::size_t cases = 0; // 0: suite default
    std::uint64_t seed = kDefaultSeed;
    std::size_t restarts = 32;
    double tol = 1e-7;
};

/// Names of the available suites, in documentation order.
const std::vector<std::string>& suite_names();

/// Runs one named suite with seeded randomness (case k derives its generator
/// from seed and k, so results are independent of execution order). Throws
/// contract_violation for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteConfig& config = {});

} // namespace coherence::verify
