#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qap {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Scale { Desk, Paper };
Scale parse_scale(const std::string& s);

struct ExperimentSpec {
    std::string name;
    Scale scale = Scale::Desk;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int jobs = 1;
    std::optional<long> trials;  // overrides the scale default
    std::optional<long> iters;
};

struct TrialStatus {
    std::string id;
    bool ok = true;
    std::string message;
};

struct ExperimentReport {
    std::vector<std::string> checks;  // "PASS ..." or "FAIL ..."
    std::vector<TrialStatus> trials;
    int exit_code = 0;  // 0 pass, 2 assertion failure, 3 numerical failure
};

const std::vector<std::string>& experiment_registry();
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Smallest v such that at least p percent of the sample is <= v.
double percentile_nearest_rank(std::vector<double> v, double p);

// Reads <dir>/traces/<group>__seed<k>.csv and writes <dir>/summary.csv with
// columns group,key,metric,count,mean,median,p10,p25,p75,p90.
void summarize_traces(const std::string& dir);

}  // namespace qap
