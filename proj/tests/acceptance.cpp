// Acceptance suite: one pass/fail line per criterion, tolerances pinned below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "factorcount/criteria.hpp"
#include "factorcount/rmt.hpp"
#include "factorcount/simulate.hpp"

using namespace fc;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1 & 2: noise-estimator MAE reproduction and estimator ordering.
// Targets are the published log10 MAE values for the corrected estimator on
// the covariance model at N = T in {50, 200, 400} (the size pairing that
// reproduces the published table; see the README's reproduction notes).
void criteria_1_and_2() {
    const std::vector<int> grid = {50, 200, 400};
    const double targets[3] = {-0.95594, -1.60601, -1.92219};
    const double tol = 0.1;

    const auto cells =
        run_noise_study(Model::M1, Population::Gaussian, 1.0, grid, 200, 101);

    bool pass1 = true;
    std::ostringstream d1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double star = cells[i].result.summary.at("star").log10_mae;
        const double mle = cells[i].result.summary.at("mle").log10_mae;
        const bool in_window = std::abs(star - targets[i]) <= tol;
        const bool below_mle = star < mle;
        if (!in_window || !below_mle) pass1 = false;
        d1 << "N=" << cells[i].n << " star=" << fmt(star) << " (target "
           << fmt(targets[i]) << "±" << fmt(tol) << ", mle=" << fmt(mle) << ") ";
    }
    report(1, "noise-estimator MAE reproduction", pass1, d1.str());

    bool pass2 = true;
    std::ostringstream d2;
    for (const auto& cell : cells) {
        const double star = cell.result.summary.at("star").log10_mae;
        const double mle = cell.result.summary.at("mle").log10_mae;
        const double p = cell.result.summary.at("p").log10_mae;
        const double kn = cell.result.summary.at("kn").log10_mae;
        if (!(star < mle && mle < p && mle < kn)) pass2 = false;
        d2 << "N=" << cell.n << " star<mle<{p,kn}: " << fmt(star) << "<" << fmt(mle)
           << "<{" << fmt(p) << "," << fmt(kn) << "} ";
    }
    report(2, "estimator ordering", pass2, d2.str());
}

// ---------------------------------------------------------------------------
// Criterion 3: factor-count table reproduction on the identity-noise factor
// model, Gaussian innovations, 200 replications, m0 = 8.
void criterion_3() {
    const auto cells = run_count_study(Model::M3, Population::Gaussian,
                                       {{100, 60}, {10, 50}}, 8, 200, 202);
    bool pass = true;
    std::ostringstream d;

    {  // (N, T) = (100, 60): corrected criteria nail 4, PC_p3 overshoots mildly.
        const auto& r = cells[0].result;
        for (const char* name : {"PCstar_p1", "PCstar_p2", "PCstar_p3"}) {
            const double mean = r.summary.at(name).mean;
            if (std::abs(mean - 4.00) > 0.05) pass = false;
            d << name << "=" << fmt(mean) << " ";
        }
        const double pc3 = r.summary.at("PC_p3").mean;
        if (std::abs(pc3 - 4.16) > 0.15) pass = false;
        d << "PC_p3=" << fmt(pc3) << " (target 4.16±0.15) | ";
    }
    {  // (N, T) = (10, 50): original criteria saturate at 8, corrected ~4.
        const auto& r = cells[1].result;
        for (const char* name : {"PC_p1", "PC_p2", "PC_p3"}) {
            const double mean = r.summary.at(name).mean;
            if (std::abs(mean - 8.00) > 0.05) pass = false;
            d << name << "=" << fmt(mean) << " ";
        }
        const auto& s = r.summary.at("PCstar_p1");
        if (std::abs(s.mean - 4.01) > 0.2) pass = false;
        if (s.std_dev > 0.8) pass = false;
        d << "PCstar_p1=" << fmt(s.mean) << "(" << fmt(s.std_dev)
          << ") (target 4.01±0.2, std<=0.8)";
    }
    report(3, "factor-count table reproduction", pass, d.str());
}

// ---------------------------------------------------------------------------
// Criterion 4: Gamma robustness on the half-and-half noise model.
void criterion_4() {
    const auto cells =
        run_count_study(Model::M4, Population::Gamma, {{100, 100}}, 8, 200, 303);
    const double targets[3] = {4.00, 4.00, 4.01};
    const char* names[3] = {"PCstar_p1", "PCstar_p2", "PCstar_p3"};
    bool pass = true;
    std::ostringstream d;
    for (int j = 0; j < 3; ++j) {
        const double mean = cells[0].result.summary.at(names[j]).mean;
        if (std::abs(mean - targets[j]) > 0.1) pass = false;
        d << names[j] << "=" << fmt(mean) << " (target " << fmt(targets[j])
          << "±0.10) ";
    }
    report(4, "Gamma robustness", pass, d.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: property suite.
bool prop_stieltjes() {
    const std::vector<SpectralLaw> laws = {
        SpectralLaw(0.5, {{1.0, 1.0}}),
        SpectralLaw(1.5, {{1.0, 1.0}}),
        SpectralLaw(0.5, {{2.0, 0.5}, {1.0, 0.5}}),
        SpectralLaw(2.0, {{8.0, 0.5}, {4.0, 0.5}}),
        SpectralLaw(0.2, {{3.0, 0.2}, {2.0, 0.3}, {1.0, 0.5}}),
    };
    for (const auto& law : laws) {
        for (int k = 0; k < 100; ++k) {
            const Complex z(-2.0 + 30.0 * k / 99.0, 0.7);
            const Complex m = stieltjes_companion(z, law);
            Complex s = 0.0;
            for (const auto& [t, w] : law.h_atoms) s += w * t / (1.0 + t * m);
            if (std::abs(-1.0 / m + law.c * s - z) > 1e-12 * std::max(1.0, std::abs(z)))
                return false;
            if (m.imag() <= 0.0) return false;
            if (std::abs(stieltjes_companion(std::conj(z), law) - std::conj(m)) > 1e-12)
                return false;
        }
    }
    return true;
}

bool prop_mu_x() {
    const std::vector<SpectralLaw> laws = {
        SpectralLaw(0.5, {{1.0, 1.0}}, {1, 0.0}),
        SpectralLaw(1.5, {{2.0, 0.5}, {1.0, 0.5}}, {1, 3.0}),
    };
    for (const auto& law : laws)
        if (std::abs(mu_x(law) - mu_x(law, 2.0)) > 1e-6) return false;
    return mu_x(SpectralLaw(0.7, {{2.0, 0.5}, {1.0, 0.5}}, {0, 0.0})) == 0.0;
}

bool prop_clt_mean(std::string& detail) {
    // For a white bulk at c = 1/2, q = 1, beta = 0: the centered statistic
    // (N - m) * (mle - sigma^2) over Gaussian draws with known spikes has
    // asymptotic mean mu_x - b.
    const int n = 400, t = 800, m = 4, reps = 5000;
    const double alphas[4] = {25.0, 16.0, 16.0, 9.0};
    const double c = static_cast<double>(n) / t;

    SpectralLaw law(c, {{1.0, 1.0}}, {1, 0.0});
    const double mu = mu_x(law);
    SpectrumSpec spec({{25.0, 1}, {16.0, 2}, {9.0, 1}}, {{1.0, 1.0}}, 1.0);
    const double b = bias_b(spec, law);

    std::vector<double> stats(reps);
    parallel_for(reps, [&](int r) {
        std::mt19937_64 rng(9000 + r);
        std::normal_distribution<double> dist;
        Matrix x(n, t);
        for (int i = 0; i < n; ++i) {
            const double sd = i < 4 ? std::sqrt(alphas[i]) : 1.0;
            for (int j = 0; j < t; ++j) x(i, j) = sd * dist(rng);
        }
        Matrix s = x * x.transpose() / static_cast<double>(t);
        Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
        double tail = 0.0;
        for (int j = 0; j < n - m; ++j) tail += solver.eigenvalues()[j];
        const double mle = tail / (n - m);
        stats[r] = (n - m) * (mle - 1.0);
    });
    double mean = 0.0;
    for (double v : stats) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : stats) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / reps) / std::sqrt(static_cast<double>(reps));
    detail = "stat=" + fmt(mean) + " target=" + fmt(mu - b) + " se=" + fmt(se);
    return std::abs(mean - (mu - b)) <= 3.0 * se;
}

bool prop_v_identity() {
    std::mt19937_64 rng(55);
    std::normal_distribution<double> dist;
    for (int rep = 0; rep < 50; ++rep) {
        Matrix x(8, 12);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 12; ++j) x(i, j) = dist(rng);
        PanelData panel(x);
        Matrix xc = panel.row_demeaned();
        Matrix s = xc * xc.transpose() / 12.0;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
        double prev = std::numeric_limits<double>::infinity();
        for (int m = 0; m <= 8; ++m) {
            double tail = 0.0;
            for (int j = 0; j < 8 - m; ++j) tail += solver.eigenvalues()[j];
            const double v = pca_objective(panel, m);
            if (std::abs(v - tail / 8.0) > 1e-10) return false;
            if (v > prev + 1e-12) return false;
            prev = v;
        }
    }
    return true;
}

bool prop_argmin_scale() {
    DgpSpec dgp;
    dgp.model = Model::M3;
    dgp.n = 60;
    dgp.t = 80;
    dgp.seed = 77;
    const PanelData panel = generate_panel(dgp);
    const std::vector<NonSpike> ns = {{1.0, 1.0}};
    const auto base = pc_star(panel, 8, ns, {1, 0.0});
    for (double s : {0.1, 10.0}) {
        const auto scaled = pc_star(PanelData(panel.values * s), 8, ns, {1, 0.0});
        for (int j = 0; j < 3; ++j)
            if (scaled[j].m_hat != base[j].m_hat) return false;
    }
    return true;
}

bool prop_determinism() {
    const auto serialize = [](const std::vector<CountCell>& cells) {
        std::ostringstream os;
        os.precision(17);
        for (const auto& cell : cells)
            for (const auto& [name, vals] : cell.result.estimates) {
                os << name << ":";
                for (double v : vals) os << v << ",";
            }
        return os.str();
    };
    const auto a =
        run_count_study(Model::M4, Population::Gamma, {{40, 50}}, 8, 12, 606);
    const auto b =
        run_count_study(Model::M4, Population::Gamma, {{40, 50}}, 8, 12, 606);
    return serialize(a) == serialize(b);
}

void criterion_5() {
    bool pass = true;
    std::ostringstream d;

    const bool st = prop_stieltjes();
    pass &= st;
    d << "stieltjes=" << (st ? "ok" : "FAIL") << " ";

    const bool mx = prop_mu_x();
    pass &= mx;
    d << "mu_x-contour=" << (mx ? "ok" : "FAIL") << " ";

    std::string clt_detail;
    const bool clt = prop_clt_mean(clt_detail);
    pass &= clt;
    d << "clt-mean=" << (clt ? "ok" : "FAIL") << " (" << clt_detail << ") ";

    const bool vi = prop_v_identity();
    pass &= vi;
    d << "V-identity=" << (vi ? "ok" : "FAIL") << " ";

    const bool as = prop_argmin_scale();
    pass &= as;
    d << "argmin-scale=" << (as ? "ok" : "FAIL") << " ";

    const bool det = prop_determinism();
    pass &= det;
    d << "determinism=" << (det ? "ok" : "FAIL");

    report(5, "property suite", pass, d.str());
}

// ---------------------------------------------------------------------------
// Criterion 6: consistency smoke test at N = T = 400.
void criterion_6() {
    const auto cells =
        run_count_study(Model::M3, Population::Gaussian, {{400, 400}}, 8, 50, 404);
    bool pass = true;
    std::ostringstream d;
    for (const char* name : {"PCstar_p1", "PCstar_p2", "PCstar_p3"}) {
        const auto& vals = cells[0].result.estimates.at(name);
        int hits = 0;
        for (double v : vals)
            if (v == 4.0) ++hits;
        const double frac = static_cast<double>(hits) / vals.size();
        if (frac < 0.98) pass = false;
        d << name << "=" << fmt(100.0 * frac) << "% ";
    }
    report(6, "consistency smoke test", pass, d.str());
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criteria_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance finished in %.1fs: %s\n", elapsed,
                g_failures == 0 ? "all criteria passed"
                                : (std::to_string(g_failures) + " criterion(s) failed").c_str());
    return g_failures == 0 ? 0 : 1;
}
