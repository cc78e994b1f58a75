#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonlocal/report.hpp"

namespace nonlocal {

struct SuiteOptions {
    std::optional<int> n;     // restricts the dimension grid of every suite
    std::optional<double> s;  // restricts the order grid
    std::vector<double> eps;  // empty: per-suite default list
    double alpha = 2;         // perturbed-disk exponent (slab)
    std::optional<double> tol;  // overrides the tolerance of two-sided comparisons
    std::uint64_t seed = 42;
    long samples = 200000;  // Monte Carlo samples per estimate
    int threads = 0;        // 0: hardware concurrency

    // throws std::invalid_argument for values no suite accepts
    void validate() const;
};

// constants, fraclap, barrier, poisson, bochner, ellipsoid, slab, perimeter, counterexamples
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);  // the names above or "all"

// Runs the checks of one suite (or all of them) concurrently; result sorted by check_id.
// Unknown suite or options rejected by the suite: std::invalid_argument.
// A check that throws while running is reported as failed with the message in metadata["error"].
std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts);

Report make_report(const std::string& suite, const SuiteOptions& opts, std::vector<CheckReport> checks);

struct Explanation {
    std::string id;         // check family, the part of a check_id before '['
    std::string statement;  // what is being verified
    std::string formula;
    std::string tolerance;  // tolerance and the reason for it
};

const std::vector<Explanation>& explanations();
// Accepts a family id ("moments.n3") or a full check_id.
std::optional<Explanation> explain(const std::string& check_id);

}  // namespace nonlocal
