#include <doctest.h>

#include <cstdlib>

#include "factorcount/simulate.hpp"

using namespace fc;

TEST_CASE("draw_innovations: standardization and determinism") {
    Rng rng(7);
    const Matrix g = draw_innovations(Population::Gamma, 400, 400, rng);
    const double mean = g.mean();
    const double var = (g.array() - mean).square().mean();
    const double bound = 4.0 / std::sqrt(400.0 * 400.0);
    CHECK(std::abs(mean) < bound);
    CHECK(std::abs(var - 1.0) < 10.0 * bound);

    // Fourth moment ~ 6 for the standardized Gamma(2,1), so beta = 3.
    const double m4 = (g.array() - mean).pow(4).mean();
    CHECK(m4 == doctest::Approx(6.0).epsilon(0.05));
    CHECK(population_beta(Population::Gamma) == doctest::Approx(3.0));
    CHECK(population_beta(Population::Gaussian) == doctest::Approx(0.0));

    Rng rng2(7);
    const Matrix g2 = draw_innovations(Population::Gamma, 400, 400, rng2);
    CHECK((g - g2).norm() == 0.0);  // bit-identical under the same seed
}

TEST_CASE("build_noise_transform: shapes and spectra") {
    Rng rng(11);
    CHECK((build_noise_transform(Model::M3, 4, rng) - Matrix::Identity(4, 4)).norm() == 0.0);

    const Matrix d = build_noise_transform(Model::M4, 4, rng);
    CHECK(d(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(d(1, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(d(2, 2) == doctest::Approx(1.0));
    CHECK(d(3, 3) == doctest::Approx(1.0));

    const int n = 31;
    const Matrix vhalf = build_noise_transform(Model::M5, n, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(vhalf * vhalf.transpose());
    const Vector ev = solver.eigenvalues();
    for (int i = 0; i < n / 2; ++i) CHECK(ev[i] == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = n / 2; i < n; ++i) CHECK(ev[i] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("generate_panel: covariance model population spectrum at n = 10") {
    DgpSpec dgp;
    dgp.model = Model::M1;
    dgp.n = 10;
    dgp.t = 20;
    dgp.seed = 1;
    // The generating transform's squared diagonal must equal the population
    // eigenvalues (100, 64, 64, 36, 8, 8, 8, 4, 4, 4).
    const SpectrumSpec spec = covariance_model_spec();
    const auto pop = population_eigenvalues(spec, 10);
    const std::vector<double> expect = {100, 64, 64, 36, 8, 8, 8, 4, 4, 4};
    for (int k = 0; k < 10; ++k) CHECK(pop[k] == doctest::Approx(expect[k]));
    CHECK_NOTHROW(generate_panel(dgp));
}

TEST_CASE("generate_panel: theta = 0 gives rank at most 4") {
    DgpSpec dgp;
    dgp.model = Model::M3;
    dgp.n = 30;
    dgp.t = 40;
    dgp.theta = 0.0;
    dgp.seed = 3;
    const PanelData panel = generate_panel(dgp);
    Eigen::JacobiSVD<Matrix> svd(panel.values);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()[k] > 1e-9 * svd.singularValues()[0]) ++rank;
    CHECK(rank <= 4);
}

TEST_CASE("generate_panel: spiked structure dominates at large N") {
    DgpSpec dgp;
    dgp.model = Model::M3;
    dgp.n = 400;
    dgp.t = 400;
    dgp.seed = 5;
    const PanelData panel = generate_panel(dgp);
    const auto s = sample_spectrum(panel, false);
    CHECK(s.values[3] > 3.0 * s.values[4]);
}

TEST_CASE("run_count_study: seeded determinism, independent of thread count") {
    const std::vector<std::pair<int, int>> grid = {{30, 40}};
    const auto a = run_count_study(Model::M3, Population::Gaussian, grid, 6, 8, 42);
    const auto b = run_count_study(Model::M3, Population::Gaussian, grid, 6, 8, 42);
    REQUIRE(a.size() == 1);
    for (const auto& [name, vals] : a[0].result.estimates) {
        const auto& other = b[0].result.estimates.at(name);
        REQUIRE(vals.size() == other.size());
        for (std::size_t i = 0; i < vals.size(); ++i) CHECK(vals[i] == other[i]);
    }

    setenv("FACTORCOUNT_THREADS", "1", 1);
    const auto serial = run_count_study(Model::M3, Population::Gaussian, grid, 6, 8, 42);
    unsetenv("FACTORCOUNT_THREADS");
    for (const auto& [name, vals] : a[0].result.estimates) {
        const auto& other = serial[0].result.estimates.at(name);
        for (std::size_t i = 0; i < vals.size(); ++i) CHECK(vals[i] == other[i]);
    }
}

TEST_CASE("run_noise_study: single replication is a plain absolute error") {
    const auto cells =
        run_noise_study(Model::M1, Population::Gaussian, 0.5, {50}, 1, 7);
    REQUIRE(cells.size() == 1);
    const auto& res = cells[0].result;
    for (const auto& [name, vals] : res.estimates) {
        REQUIRE(vals.size() == 1);
        CHECK(res.summary.at(name).log10_mae ==
              doctest::Approx(std::log10(std::abs(vals[0] - 4.0))).epsilon(1e-12));
    }
}
