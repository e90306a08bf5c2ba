#include "factorcount/simulate.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

namespace fc {

double population_beta(Population population) {
    // beta = E|xi|^4 - q - 2 with q = 1.  Gaussian: E|xi|^4 = 3 -> 0.
    // Standardized Gamma(2,1): excess kurtosis 6/shape = 3 -> E|xi|^4 = 6 -> 3.
    return population == Population::Gaussian ? 0.0 : 3.0;
}

Matrix draw_innovations(Population population, int rows, int cols, Rng& rng) {
    if (rows < 1 || cols < 1) throw dimension_error("draw_innovations: invalid dims");
    Matrix out(rows, cols);
    if (population == Population::Gaussian) {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) out(i, j) = dist(rng);
    } else {
        std::gamma_distribution<double> dist(2.0, 1.0);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) out(i, j) = (dist(rng) - 2.0) * inv_sqrt2;
    }
    return out;
}

Matrix build_noise_transform(Model model, int n, Rng& rng) {
    if (n < 2) throw dimension_error("build_noise_transform: need n >= 2");
    const int n_two = (n + 1) / 2;  // ceil(n/2) atoms equal to 2
    switch (model) {
        case Model::M3:
            return Matrix::Identity(n, n);
        case Model::M4: {
            Vector d = Vector::Ones(n);
            d.head(n_two).setConstant(std::sqrt(2.0));
            return d.asDiagonal();
        }
        case Model::M5: {
            // Random orthogonal basis from the eigenvectors of H H'.
            Matrix h(n, n);
            std::normal_distribution<double> dist(0.0, 1.0);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) h(i, j) = dist(rng);
            Eigen::SelfAdjointEigenSolver<Matrix> solver(h * h.transpose());
            if (solver.info() != Eigen::Success)
                throw numerical_error("build_noise_transform: eigendecomposition failed");
            const Matrix u = solver.eigenvectors();
            Vector d = Vector::Ones(n);
            d.head(n_two).setConstant(std::sqrt(2.0));
            return u * d.asDiagonal() * u.transpose();
        }
        default:
            return Matrix::Identity(n, n);
    }
}

SpectrumSpec covariance_model_spec() {
    return SpectrumSpec({{25.0, 1}, {16.0, 2}, {9.0, 1}},
                        {{2.0, 0.5}, {1.0, 0.5}}, 4.0);
}

std::vector<NonSpike> model_nonspikes(Model model) {
    if (model == Model::M4 || model == Model::M5)
        return {{2.0, 0.5}, {1.0, 0.5}};
    return {{1.0, 1.0}};
}

namespace {

// Population standard deviations for the covariance-only models: sigma^2 = 4,
// spikes (25, 16, 16, 9), then 2 repeated ceil((n-4)/2) times and 1 repeated
// floor((n-4)/2) times.
Vector covariance_model_sqrt_eigs(int n) {
    if (n < 6) throw dimension_error("covariance model: need n >= 6");
    Vector d(n);
    const double alphas[4] = {25.0, 16.0, 16.0, 9.0};
    for (int i = 0; i < 4; ++i) d[i] = std::sqrt(4.0 * alphas[i]);
    const int n_two = (n - 4 + 1) / 2;
    for (int i = 4; i < n; ++i) d[i] = std::sqrt(4.0 * (i - 4 < n_two ? 2.0 : 1.0));
    return d;
}

void summarize(ReplicationResult& res, double truth) {
    for (auto& [name, vals] : res.estimates) {
        ReplicationResult::Summary s;
        double sum = 0.0, abs_err = 0.0;
        for (double v : vals) {
            sum += v;
            abs_err += std::abs(v - truth);
        }
        const double n = static_cast<double>(vals.size());
        if (vals.empty()) continue;
        s.mean = sum / n;
        double var = 0.0;
        for (double v : vals) var += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(var / n);
        s.log10_mae = std::log10(abs_err / n);
        res.summary[name] = s;
    }
}

}  // namespace

PanelData generate_panel(const DgpSpec& spec) {
    if (spec.n < 2 || spec.t < 2) throw dimension_error("generate_panel: need N, T >= 2");
    if (spec.theta < 0.0) throw input_error("generate_panel: theta must be >= 0");
    Rng rng(spec.seed);

    if (spec.model == Model::M1 || spec.model == Model::M2) {
        const Vector d = covariance_model_sqrt_eigs(spec.n);
        Matrix xi = draw_innovations(spec.population, spec.n, spec.t, rng);
        Matrix x = d.asDiagonal() * xi;
        return PanelData(std::move(x));
    }

    const int m = static_cast<int>(spec.loading_cov_diag.size());
    if (m < 1 || m > spec.n)
        throw input_error("generate_panel: invalid loading covariance diagonal");
    // Loadings: row i of Lambda is N(0, diag(A)); equivalently column j has
    // i.i.d. N(0, A_jj) entries.
    Matrix lambda(spec.n, m);
    {
        std::normal_distribution<double> dist(0.0, 1.0);
        for (int j = 0; j < m; ++j) {
            const double sd = std::sqrt(spec.loading_cov_diag[j]);
            for (int i = 0; i < spec.n; ++i) lambda(i, j) = dist(rng) * sd;
        }
    }
    // Factors are i.i.d. standard Gaussian regardless of the innovation
    // population (the population governs the idiosyncratic noise).
    Matrix f = draw_innovations(Population::Gaussian, m, spec.t, rng);
    const Matrix vhalf = build_noise_transform(spec.model, spec.n, rng);
    Matrix xi = draw_innovations(spec.population, spec.n, spec.t, rng);
    Matrix x = lambda * f + std::sqrt(spec.theta) * (vhalf * xi);
    return PanelData(std::move(x));
}

int worker_threads() {
    if (const char* env = std::getenv("FACTORCOUNT_THREADS")) {
        const int k = std::atoi(env);
        if (k >= 1) return k;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_threads(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::vector<NoiseCell> run_noise_study(Model model, Population population,
                                       double c, const std::vector<int>& n_grid,
                                       int replications, std::uint64_t base_seed) {
    if (replications < 1) throw input_error("run_noise_study: need replications >= 1");
    if (c <= 0.0) throw input_error("run_noise_study: c must be positive");
    constexpr double kSigma2 = 4.0;
    constexpr int kM = 4;
    const double beta = population_beta(population);
    const FourthMomentSpec moments{1, beta};

    std::vector<NoiseCell> cells;
    for (int n : n_grid) {
        const int t = static_cast<int>(std::lround(n / c));
        const int n_two = (n - 4 + 1) / 2;
        const std::vector<NonSpike> nonspikes = {
            {2.0, static_cast<double>(n_two) / (n - 4)},
            {1.0, static_cast<double>(n - 4 - n_two) / (n - 4)}};
        const auto start = std::chrono::steady_clock::now();
        const std::vector<std::string> names = {"mle", "star", "p", "kn", "us", "median"};
        std::vector<std::array<double, 6>> rows(replications);
        std::vector<std::array<bool, 6>> ok(replications);

        parallel_for(replications, [&](int r) {
            DgpSpec dgp;
            dgp.model = model;
            dgp.population = population;
            dgp.n = n;
            dgp.t = t;
            dgp.seed = base_seed + static_cast<std::uint64_t>(r);
            const PanelData panel = generate_panel(dgp);
            const EigenSpectrum spec = sample_spectrum(panel, /*mean_known=*/true);
            const auto run_one = [&](int idx, auto&& callable) {
                try {
                    rows[r][idx] = callable().value;
                    ok[r][idx] = true;
                } catch (const std::exception&) {
                    ok[r][idx] = false;
                }
            };
            run_one(0, [&] { return sigma2_mle(spec, kM, nonspikes); });
            run_one(1, [&] { return sigma2_star(spec, kM, nonspikes, moments); });
            run_one(2, [&] { return sigma2_passemier(spec, kM); });
            run_one(3, [&] { return sigma2_kn(spec, kM); });
            run_one(4, [&] { return sigma2_us(spec, kM); });
            run_one(5, [&] { return sigma2_median(panel); });
        });

        NoiseCell cell{model, population, n, t, {}};
        for (std::size_t j = 0; j < names.size(); ++j) {
            auto& vec = cell.result.estimates[names[j]];
            int fail = 0;
            for (int r = 0; r < replications; ++r) {
                if (ok[r][j])
                    vec.push_back(rows[r][j]);
                else
                    ++fail;
            }
            if (fail > 0) cell.result.failures[names[j]] = fail;
        }
        cell.result.replications = replications;
        summarize(cell.result, kSigma2);
        cell.result.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::vector<CountCell> run_count_study(Model model, Population population,
                                       const std::vector<std::pair<int, int>>& nt_grid,
                                       int m0, int replications,
                                       std::uint64_t base_seed) {
    if (replications < 1) throw input_error("run_count_study: need replications >= 1");
    const double beta = population_beta(population);
    const FourthMomentSpec moments{1, beta};
    const std::vector<NonSpike> nonspikes = model_nonspikes(model);
    const std::vector<std::string> names = {"PC_p1", "PC_p2",     "PC_p3",
                                            "PCstar_p1", "PCstar_p2", "PCstar_p3"};

    std::vector<CountCell> cells;
    for (const auto& [n, t] : nt_grid) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::array<double, 6>> rows(replications);
        std::vector<bool> ok(replications, false);

        parallel_for(replications, [&](int r) {
            DgpSpec dgp;
            dgp.model = model;
            dgp.population = population;
            dgp.n = n;
            dgp.t = t;
            dgp.seed = base_seed + static_cast<std::uint64_t>(r);
            const PanelData panel = generate_panel(dgp);
            try {
                const auto pc = pc_original(panel, m0);
                const auto star = pc_star(panel, m0, nonspikes, moments);
                for (int j = 0; j < 3; ++j) rows[r][j] = pc[j].m_hat;
                for (int j = 0; j < 3; ++j) rows[r][3 + j] = star[j].m_hat;
                ok[r] = true;
            } catch (const std::exception&) {
                ok[r] = false;
            }
        });

        CountCell cell{model, population, n, t, {}};
        int fail = 0;
        for (int r = 0; r < replications; ++r) {
            if (!ok[r]) {
                ++fail;
                continue;
            }
            for (std::size_t j = 0; j < names.size(); ++j)
                cell.result.estimates[names[j]].push_back(rows[r][j]);
        }
        if (fail > 0)
            for (const auto& name : names) cell.result.failures[name] = fail;
        cell.result.replications = replications;
        summarize(cell.result, 4.0);
        cell.result.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace fc
