#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invfilter/grid_field.hpp"
#include "invfilter/rng.hpp"
#include "invfilter/spectral_operator.hpp"

namespace invfilter {

enum class DataModel { dm1, dm2 };

struct AlphaRule {
    enum class Kind { from_budget, fixed, variant_geometric };
    Kind kind = Kind::from_budget;
    double alpha = 1.0; // for fixed / variant_geometric
    double q = 0.5;     // for variant_geometric
};

// Complete experiment description. Defaults follow the experiment setup:
// 60x60 inversion cells, 120x120 data-generation cells, s = 1, a = 1.
struct ProblemSpec {
    int coarse_n = 60;
    int fine_n = 120;
    double s = 1.0;
    double a = 1.0;
    DataModel data_model = DataModel::dm1;
    std::optional<double> gamma;   // explicit per-component noise std
    std::optional<double> rho;     // or relative noise level in (0,1)
    int budget_n = 25;             // DM1 iteration budget; DM2 derives its stop index
    AlphaRule alpha_rule;
    std::uint64_t seed = 1;

    std::vector<std::string> validate() const; // returns problems; empty when valid
    std::vector<std::string> warnings() const;
};

struct TruthSample {
    GridField fine_field;        // u-dagger on the fine grid (nodal)
    GridField coarse_projection; // its spline restriction (nodal, mean-zero)
};

// Draws the truth from N(0, Sigma) with Sigma = (-Laplace + I/10)^{-(2s+1)}
// via Karhunen-Loeve on the fine cosine basis: independent standard normal
// coefficients scaled by sqrt of Sigma's eigenvalues.
TruthSample sample_truth(const ProblemSpec& spec);

// Spline restriction of a fine nodal field onto the coarse grid followed by
// mean removal. Requires fine_n > coarse_n.
GridField restrict_to_coarse(const GridField& fine, int coarse_n);

// gamma = rho * ||A u|| / sqrt(dim), dim = coarse_n^2 - 1, so that a draw
// with per-coefficient std gamma has E||eta|| ~ rho ||A u||. The norm is
// taken on the restricted noise-free data.
double calibrate_gamma(const TruthSample& truth, const SpectralOperator& A_fine, double rho);

// Deterministic seed-indexed observation generator. Noise-free data A u is
// computed on the fine grid; white noise is added per fine-grid node and
// the sum is restricted to the coarse grid (inverse-crime avoidance), which
// slightly colors the noise. gamma is the per-coarse-coefficient std the
// fine-node noise is scaled to.
class DataStream {
public:
    DataStream(DataModel model, GridField noise_free_fine_nodal, int coarse_n,
               double gamma, std::uint64_t seed);

    // Observation y_index (1-based) as spectral coefficients on the coarse
    // grid. DM2 returns the identical cached field for every index; DM1 is a
    // pure function of (seed, index), safe to call concurrently.
    GridField observation(int index) const;

    DataModel model() const { return model_; }
    double gamma() const { return gamma_; }
    const GridField& noise_free_coarse() const { return noise_free_coarse_; }

private:
    GridField make_observation(int index) const;

    DataModel model_;
    GridField noise_free_fine_;   // nodal
    GridField noise_free_coarse_; // spectral
    int coarse_n_;
    double gamma_;
    std::uint64_t seed_;
    GridField dm2_cache_;
};

DataStream generate_data(const ProblemSpec& spec, const TruthSample& truth,
                         const SpectralOperator& A_fine, double gamma);

struct AveragedObservation {
    GridField mean;            // running average of y_1..y_n (spectral)
    double predicted_std_scale; // 1/sqrt(n)
};

// Average of the first n observations of a DM1 stream; rejects DM2 streams.
AveragedObservation average_observations(const DataStream& stream, int n);

} // namespace invfilter
