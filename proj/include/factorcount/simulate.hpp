#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "factorcount/criteria.hpp"

namespace fc {

enum class Model { M1, M2, M3, M4, M5 };
enum class Population { Gaussian, Gamma };

// Fourth-moment beta for a population of real innovations:
// Gaussian -> 0; standardized Gamma(2, 1) -> E|xi|^4 - 3 = 3.
double population_beta(Population population);

struct DgpSpec {
    Model model = Model::M3;
    Population population = Population::Gaussian;
    int n = 100;
    int t = 100;
    double theta = 3.0;
    std::vector<double> loading_cov_diag = {5.0, 4.0, 4.0, 3.0};
    std::uint64_t seed = 0;
};

// Summary of a replication study.
struct ReplicationResult {
    // method/criterion name -> per-replication values (replication order).
    std::map<std::string, std::vector<double>> estimates;
    struct Summary {
        double mean = 0.0;
        double std_dev = 0.0;
        double log10_mae = 0.0;
    };
    std::map<std::string, Summary> summary;
    int replications = 0;
    double elapsed_seconds = 0.0;
    // method -> count of failed replications (excluded from the summary).
    std::map<std::string, int> failures;
};

// One grid cell of a noise study (fixed model/population/N).
struct NoiseCell {
    Model model;
    Population population;
    int n;
    int t;
    ReplicationResult result;
};

struct CountCell {
    Model model;
    Population population;
    int n;
    int t;
    ReplicationResult result;
};

using Rng = std::mt19937_64;

// i.i.d. innovations: Gaussian -> N(0,1); Gamma -> (Gamma(2,1) - 2)/sqrt(2).
Matrix draw_innovations(Population population, int rows, int cols, Rng& rng);

// Square root of the idiosyncratic covariance V for the factor models:
// identity; diag(sqrt(2) x ceil(n/2), 1 x floor(n/2)); or the same spectrum
// conjugated by a random orthogonal eigenbasis.
Matrix build_noise_transform(Model model, int n, Rng& rng);

// The population spectrum used by the covariance-only models: sigma^2 = 4,
// spikes (25, 16, 16, 9), bulk atoms 2 (ceil((n-4)/2) times) and
// 1 (floor((n-4)/2) times).
SpectrumSpec covariance_model_spec();

// Non-spike atoms/weights of the idiosyncratic spectrum for a factor model
// (identity -> {1: 1}; half-and-half -> {2: 1/2, 1: 1/2}).
std::vector<NonSpike> model_nonspikes(Model model);

// One simulated panel per the model's data-generating process.
PanelData generate_panel(const DgpSpec& spec);

// Noise-variance estimator study: for each N on the grid, runs all six
// estimators with m = 4 assumed known and the true bulk spectrum supplied,
// over `replications` panels (replication r uses seed base_seed + r); reports
// the log10 mean absolute error of each estimator against sigma^2 = 4.
// T is derived from c: T = round(N / c).
std::vector<NoiseCell> run_noise_study(Model model, Population population,
                                       double c, const std::vector<int>& n_grid,
                                       int replications, std::uint64_t base_seed);

// Factor-count study: for each (N, T), runs PC_p1..3 and PC*_p1..3 with the
// given m0 over `replications` panels and reports per-criterion means and
// standard deviations.
std::vector<CountCell> run_count_study(Model model, Population population,
                                       const std::vector<std::pair<int, int>>& nt_grid,
                                       int m0, int replications,
                                       std::uint64_t base_seed);

// Number of worker threads: FACTORCOUNT_THREADS if set, else hardware cores.
int worker_threads();

// Runs fn(r) for r = 0..count-1 on the worker pool; results must be written
// to per-index slots by the callable so reduction order is deterministic.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace fc
