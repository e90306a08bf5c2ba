#include "factorcount/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fc {

namespace {

int argmin_smallest(const std::vector<double>& v, const std::vector<int>& excluded) {
    int best = -1;
    for (std::size_t m = 0; m < v.size(); ++m) {
        if (std::find(excluded.begin(), excluded.end(), static_cast<int>(m)) !=
            excluded.end())
            continue;
        if (best < 0 || v[m] < v[best]) best = static_cast<int>(m);
    }
    if (best < 0) throw numerical_error("argmin: every candidate m failed");
    return best;
}

}  // namespace

FactorBasis estimate_factors(const PanelData& panel, int m) {
    panel.validate();
    const int n = static_cast<int>(panel.n());
    const int t = static_cast<int>(panel.t());
    if (m < 0 || m > std::min(n, t))
        throw dimension_error("estimate_factors: need 0 <= m <= min(N, T)");

    const Matrix x = panel.row_demeaned();
    FactorBasis out;
    if (m == 0) {
        out.factors = Matrix::Zero(t, 0);
        out.loadings = Matrix::Zero(n, 0);
        return out;
    }
    const Matrix gram = x.transpose() * x;  // T x T
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    if (solver.info() != Eigen::Success)
        throw numerical_error("estimate_factors: eigendecomposition failed");
    // Eigen returns ascending order; take the top m columns, largest first.
    out.factors = Matrix(t, m);
    for (int k = 0; k < m; ++k)
        out.factors.col(k) = solver.eigenvectors().col(t - 1 - k) * std::sqrt(double(t));
    out.loadings = x * out.factors / static_cast<double>(t);
    return out;
}

double pca_objective(const PanelData& panel, int m) {
    const int n = static_cast<int>(panel.n());
    const int t = static_cast<int>(panel.t());
    if (m < 0 || m > std::min(n, t))
        throw dimension_error("pca_objective: need 0 <= m <= min(N, T)");
    const Matrix x = panel.row_demeaned();
    if (m == 0) return x.squaredNorm() / static_cast<double>(n) / t;
    const FactorBasis fb = estimate_factors(panel, m);
    const Matrix resid = x - fb.loadings * fb.factors.transpose();
    return resid.squaredNorm() / static_cast<double>(n) / t;
}

double penalty(Penalty which, int n, int t) {
    if (n < 2 || t < 2) throw dimension_error("penalty: need N, T >= 2");
    const double nd = n, td = t;
    const double c2 = std::min(nd, td);
    switch (which) {
        case Penalty::g1:
            return (nd + td) / (nd * td) * std::log(nd * td / (nd + td));
        case Penalty::g2:
            return (nd + td) / (nd * td) * std::log(c2);
        case Penalty::g3:
            return std::log(c2) / c2;
    }
    throw input_error("penalty: unknown selector");
}

std::vector<CriterionReport> pc_original(const PanelData& panel, int m0) {
    panel.validate();
    const int n = static_cast<int>(panel.n());
    const int t = static_cast<int>(panel.t());
    if (m0 < 1 || m0 > std::min(n, t) - 1)
        throw dimension_error("pc_original: need 1 <= m0 <= min(N, T) - 1");

    // V(m) for all m at once via the tail-eigenvalue identity.
    const Matrix x = panel.row_demeaned();
    const Matrix s = x * x.transpose() / static_cast<double>(t);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw numerical_error("pc_original: eigendecomposition failed");
    const Vector ev = solver.eigenvalues();  // ascending
    std::vector<double> v(m0 + 1, 0.0);
    double tail = 0.0;
    for (int j = 0; j < n; ++j) tail += std::max(0.0, ev[j]);
    for (int m = 0; m <= m0; ++m) {
        v[m] = tail / n;
        if (m < n) tail -= std::max(0.0, ev[n - 1 - m]);
    }

    const double scale = v[m0];
    const Penalty which[3] = {Penalty::g1, Penalty::g2, Penalty::g3};
    const Criterion crit[3] = {Criterion::PC1, Criterion::PC2, Criterion::PC3};
    std::vector<CriterionReport> out;
    for (int j = 0; j < 3; ++j) {
        CriterionReport rep;
        rep.criterion = crit[j];
        rep.m0 = m0;
        rep.penalty_scale = scale;
        const double g = penalty(which[j], n, t);
        rep.values.resize(m0 + 1);
        for (int m = 0; m <= m0; ++m) rep.values[m] = v[m] + m * scale * g;
        rep.m_hat = argmin_smallest(rep.values, {});
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<CriterionReport> pc_star_from_spectrum(
    const EigenSpectrum& spectrum, int m0,
    const std::vector<NonSpike>& nonspikes, const FourthMomentSpec& moments) {
    spectrum.validate();
    if (m0 < 1 || m0 > spectrum.n - 1)
        throw dimension_error("pc_star: need 1 <= m0 <= N - 1");

    std::vector<NoiseEstimate> estimates(m0 + 1);
    std::vector<int> failed;
    for (int m = 0; m <= m0; ++m) {
        try {
            estimates[m] = sigma2_star(spectrum, m, nonspikes, moments);
        } catch (const std::exception&) {
            failed.push_back(m);
            estimates[m].value = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (std::find(failed.begin(), failed.end(), m0) != failed.end())
        throw numerical_error("pc_star: noise estimation failed at m0");

    // Penalty scale: the corrected estimate at m0 when all m0 candidate
    // spikes are super-critical, else the uncorrected estimate at m0.
    const auto& top = estimates[m0];
    double scale = top.value;
    auto it = top.diagnostics.find("all_supercritical");
    if (it != top.diagnostics.end() && it->second == 0.0)
        scale = top.diagnostics.at("mle");

    const Penalty which[3] = {Penalty::g1, Penalty::g2, Penalty::g3};
    const Criterion crit[3] = {Criterion::PCSTAR1, Criterion::PCSTAR2,
                               Criterion::PCSTAR3};
    std::vector<CriterionReport> out;
    for (int j = 0; j < 3; ++j) {
        CriterionReport rep;
        rep.criterion = crit[j];
        rep.m0 = m0;
        rep.penalty_scale = scale;
        rep.noise_backing = estimates;
        rep.failed_m = failed;
        const double g = penalty(which[j], spectrum.n, spectrum.t_eff + 1);
        rep.values.resize(m0 + 1);
        for (int m = 0; m <= m0; ++m)
            rep.values[m] = estimates[m].value + m * scale * g;
        rep.m_hat = argmin_smallest(rep.values, failed);
        out.push_back(std::move(rep));
    }
    return out;
}

std::vector<CriterionReport> pc_star(const PanelData& panel, int m0,
                                     const std::vector<NonSpike>& nonspikes,
                                     const FourthMomentSpec& moments) {
    const EigenSpectrum spectrum = sample_spectrum(panel, /*mean_known=*/false);
    return pc_star_from_spectrum(spectrum, m0, nonspikes, moments);
}

int choose_m0(int n, int t, const M0Mode& mode) {
    if (n < 2 || t < 2) throw dimension_error("choose_m0: need N, T >= 2");
    int m0 = mode.is_fraction ? static_cast<int>(std::lround(mode.fraction * n))
                              : mode.fixed;
    const int hi = std::min(n, t) - 1;
    m0 = std::max(1, std::min(m0, hi));
    return m0;
}

}  // namespace fc
