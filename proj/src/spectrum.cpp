#include "factorcount/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fc {

void SpectrumSpec::validate() const {
    double wsum = 0.0;
    double rmax = 0.0;
    for (std::size_t i = 0; i < nonspikes.size(); ++i) {
        const auto& ns = nonspikes[i];
        if (ns.r <= 0.0) throw input_error("SpectrumSpec: non-spike atoms must be positive");
        if (ns.omega <= 0.0 || ns.omega > 1.0)
            throw input_error("SpectrumSpec: weights must lie in (0, 1]");
        if (i > 0 && nonspikes[i - 1].r <= ns.r)
            throw input_error("SpectrumSpec: non-spikes must be strictly decreasing");
        wsum += ns.omega;
        rmax = std::max(rmax, ns.r);
    }
    if (!nonspikes.empty() && std::abs(wsum - 1.0) > 1e-12)
        throw input_error("SpectrumSpec: non-spike weights must sum to 1");
    for (std::size_t k = 0; k < spikes.size(); ++k) {
        const auto& s = spikes[k];
        if (s.alpha <= 0.0) throw input_error("SpectrumSpec: spikes must be positive");
        if (s.multiplicity <= 0) throw input_error("SpectrumSpec: spike multiplicity must be positive");
        if (k > 0 && spikes[k - 1].alpha <= s.alpha)
            throw input_error("SpectrumSpec: spikes must be strictly decreasing");
        if (s.alpha <= rmax)
            throw input_error("SpectrumSpec: every spike must exceed the largest non-spike atom");
    }
    if (sigma2 <= 0.0) throw input_error("SpectrumSpec: sigma2 must be positive");
}

EigenSpectrum::EigenSpectrum(std::vector<double> v, int n_, int t_eff_)
    : values(std::move(v)), n(n_), t_eff(t_eff_),
      c_eff(static_cast<double>(n_) / static_cast<double>(t_eff_)) {
    validate();
}

void EigenSpectrum::validate() const {
    if (n < 2 || t_eff < 1) throw dimension_error("EigenSpectrum: invalid dimensions");
    if (static_cast<int>(values.size()) != n)
        throw dimension_error("EigenSpectrum: eigenvalue count does not match n");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j])) throw input_error("EigenSpectrum: non-finite eigenvalue");
        if (values[j] < 0.0) throw input_error("EigenSpectrum: negative eigenvalue");
        if (j > 0 && values[j - 1] < values[j] - 1e-10)
            throw input_error("EigenSpectrum: eigenvalues not sorted descending");
    }
}

EigenSpectrum sample_spectrum(const PanelData& panel, bool mean_known) {
    panel.validate();
    const int n = static_cast<int>(panel.n());
    const int t = static_cast<int>(panel.t());

    Matrix x = mean_known ? panel.values : panel.row_demeaned();
    const int t_eff = mean_known ? t : t - 1;

    Matrix s = (x * x.transpose()) / static_cast<double>(t_eff);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw numerical_error("sample_spectrum: eigendecomposition failed");

    Vector ev = solver.eigenvalues();  // ascending
    std::vector<double> vals(n);
    for (int j = 0; j < n; ++j) {
        double v = ev[n - 1 - j];
        if (v < 0.0) {
            // PSD analytically; small negative round-off is clamped.
            if (v < -1e-10 * std::max(1.0, std::abs(ev[n - 1])))
                throw numerical_error("sample_spectrum: eigenvalue significantly negative");
            v = 0.0;
        }
        vals[j] = v;
    }
    return EigenSpectrum(std::move(vals), n, t_eff);
}

std::vector<double> population_eigenvalues(const SpectrumSpec& spec, int n) {
    spec.validate();
    const int m = spec.total_spike_count();
    if (m >= n) throw dimension_error("population_eigenvalues: total spike count must be < n");

    std::vector<double> out;
    out.reserve(n);
    for (const auto& s : spec.spikes)
        for (int k = 0; k < s.multiplicity; ++k) out.push_back(spec.sigma2 * s.alpha);

    const int bulk = n - m;
    std::vector<int> counts(spec.nonspikes.size(), 0);
    int assigned = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < spec.nonspikes.size(); ++i) {
        counts[i] = static_cast<int>(std::lround(spec.nonspikes[i].omega * bulk));
        assigned += counts[i];
        if (spec.nonspikes[i].omega > spec.nonspikes[largest].omega) largest = i;
    }
    if (!spec.nonspikes.empty()) counts[largest] += bulk - assigned;  // remainder
    for (std::size_t i = 0; i < spec.nonspikes.size(); ++i)
        for (int k = 0; k < counts[i]; ++k) out.push_back(spec.sigma2 * spec.nonspikes[i].r);

    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

}  // namespace fc
