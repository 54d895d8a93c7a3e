#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invfilter/filters.hpp"
#include "invfilter/problem.hpp"

namespace invfilter {

enum class Experiment {
    single_run,
    rate_study_dm1,
    rate_study_dm2,
    diagonal_minimax,
    variant_blowup,
    oracle_suite,
};

// Flat key=value run configuration. Unknown keys are rejected; every field
// has a documented default (see default_config_text()).
struct RunConfig {
    Experiment experiment = Experiment::single_run;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    int threads = 0; // 0: library default / INVFILTER_THREADS

    // grid problem
    int coarse_n = 60;
    int fine_n = 120;
    double s = 1.0;
    double a = 1.0;
    DataModel data_model = DataModel::dm2;
    std::optional<double> gamma;       // explicit frame-units noise std
    std::optional<double> rho;         // relative noise level
    std::optional<std::string> noise;  // preset label: 1%, 2.5%, 5%
    int budget_n = 25;                 // DM1 budget
    int steps = 0;                     // trajectory length; 0 -> auto
    double alpha = 0.0;                // 0 -> budget-based selection rule
    std::string filter = "kalman";     // kalman | threedvar | both

    // studies
    std::vector<double> s_list = {1.0, 2.0, 3.0};
    std::vector<int> N_list = {100, 200, 400, 800, 1500, 3000};
    int replicates = 20;

    // diagonal sequence model
    int modes = 1000;
    double beta = 1.0;
    double eps = 0.5;
    double p = 1.0;
    double diag_gamma = 1.0;

    // variant schedule
    double variant_alpha = 1.0;
    double variant_q = 0.5;

    ProblemSpec to_problem_spec() const;
    std::vector<FilterKind> filter_kinds() const;
    // Serialized resolved configuration; parses back to an identical config.
    std::string to_text() const;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    double estimated_cost = 0.0; // rough mode-step count of the run
    bool ok() const { return errors.empty(); }
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
ValidationReport validate_config(const RunConfig& config);
std::string default_config_text();

// The three reference noise labels map to the DM2 stop indices
// {1%: 20, 2.5%: 6, 5%: 3}; the frame-units gamma realizing them follows
// gamma = N^{-(a+s+1)/(2(a+1))}.
int stop_index_for_noise_label(const std::string& label);

} // namespace invfilter
