#pragma once

#include "bfgraph/serialization.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bfgraph::cli {

/// Fully resolved run configuration; every field has a default.
struct RunConfig {
    std::string command;
    std::string rule = "bf";
    std::vector<int> decision_table;  // optional (K+1)^4 entries for bounded:K, 0 = first
    std::uint32_t n = 100000;
    double t = 1.0;
    std::vector<double> checkpoints;
    std::vector<double> t_grid;
    std::vector<double> epsilons;
    std::string side = "sub";
    int replicas = 20;
    std::uint64_t seed = 1;
    int i_max = 2048;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double precision = 1e-8;
    std::string kernel = "auto";
    bool assert_conservation = true;
    std::string kind = "concentration";
    std::vector<std::uint32_t> n_grid;
    bool fit = false;
    std::uint32_t x_cutoff = 10;
    std::uint64_t L = 64;
    std::string out = "-";
    std::string format = "json";
    int threads = 0;

    json to_json() const;
    ProcessRule process_rule() const;
};

/// Invalid configuration; reported with exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses flags, environment (BFGRAPH_*) and an optional JSON config file
/// into a resolved configuration. Throws UsageError, or returns false when
/// help was printed.
bool parse(int argc, const char* const* argv, RunConfig& config, std::ostream& out);

struct RunOutput {
    std::string body;  // the artifact
    json manifest;
};

/// Executes a resolved configuration; throws bfgraph::Error on failure.
RunOutput execute(const RunConfig& config);

/// Full entry point: parse, execute, write files. Returns the exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace bfgraph::cli
