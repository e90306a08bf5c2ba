#include "factorcount/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <numeric>

namespace fc {

namespace {

double weighted_atom_sum(const std::vector<NonSpike>& nonspikes) {
    if (nonspikes.empty()) throw input_error("noise: non-spike list must not be empty");
    double wsum = 0.0, srw = 0.0;
    for (const auto& ns : nonspikes) {
        if (ns.r <= 0.0 || ns.omega <= 0.0)
            throw input_error("noise: non-spike atoms and weights must be positive");
        wsum += ns.omega;
        srw += ns.omega * ns.r;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw input_error("noise: non-spike weights must sum to 1");
    return srw;
}

double tail_sum(const std::vector<double>& l, int m) {
    double s = 0.0;
    for (std::size_t j = m; j < l.size(); ++j) s += l[j];
    return s;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) throw dimension_error("median of empty set");
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

NoiseEstimate sigma2_mle(const EigenSpectrum& spectrum, int m,
                         const std::vector<NonSpike>& nonspikes) {
    spectrum.validate();
    if (m < 0 || m >= spectrum.n)
        throw dimension_error("sigma2_mle: need 0 <= m < N");
    const double srw = weighted_atom_sum(nonspikes);
    NoiseEstimate e;
    e.method = NoiseMethod::MLE;
    e.m_used = m;
    e.value = tail_sum(spectrum.values, m) / ((spectrum.n - m) * srw);
    return e;
}

double mu_x_unit_scale(double c, const std::vector<NonSpike>& nonspikes,
                       const FourthMomentSpec& moments) {
    if (moments.q == 0 && moments.beta == 0.0) return 0.0;
    static std::mutex mu;
    static std::map<std::string, double> cache;
    char buf[64];
    std::string key;
    std::snprintf(buf, sizeof buf, "%.17g|%d|%.17g", c, moments.q, moments.beta);
    key = buf;
    for (const auto& ns : nonspikes) {
        std::snprintf(buf, sizeof buf, "|%.17g:%.17g", ns.r, ns.omega);
        key += buf;
    }
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<std::pair<double, double>> atoms;
    for (const auto& ns : nonspikes) atoms.emplace_back(ns.r, ns.omega);
    const double val = mu_x(SpectralLaw(c, atoms, moments));
    std::lock_guard<std::mutex> lk(mu);
    cache[key] = val;
    return val;
}

NoiseEstimate sigma2_star(const EigenSpectrum& spectrum, int m,
                          const std::vector<NonSpike>& nonspikes,
                          const FourthMomentSpec& moments, bool refine) {
    spectrum.validate();
    if (m < 0 || m >= spectrum.n)
        throw dimension_error("sigma2_star: need 0 <= m < N");
    const double srw = weighted_atom_sum(nonspikes);
    const double c = spectrum.c_eff;
    const double s_mle = tail_sum(spectrum.values, m) / ((spectrum.n - m) * srw);
    const double mu_unit = mu_x_unit_scale(c, nonspikes, moments);

    std::vector<std::pair<double, double>> r_atoms;
    for (const auto& ns : nonspikes) r_atoms.emplace_back(ns.r, ns.omega);

    int subcritical = 0;
    const auto correct = [&](double s0) {
        subcritical = 0;
        if (s0 <= 0.0) return s_mle;  // degenerate spectrum: no correction possible
        std::vector<std::pair<double, double>> scaled;
        scaled.reserve(r_atoms.size());
        for (const auto& [r, w] : r_atoms) scaled.emplace_back(s0 * r, w);
        SpectralLaw law(c, scaled, moments);
        double b = 0.0;
        for (int k = 0; k < m; ++k) {
            double alpha;
            try {
                alpha = spike_inverse(spectrum.values[k], law, s0);
            } catch (const not_a_spike_error&) {
                // Sub-critical candidate: carries no recoverable spike
                // information, so it contributes nothing to the bias term.
                ++subcritical;
                continue;
            }
            for (const auto& ns : nonspikes)
                b += c * alpha * s0 * ns.r * ns.omega / (alpha - ns.r);
        }
        const double mu = mu_unit * s0;
        return s_mle + (b - mu) / ((spectrum.n - m) * srw);
    };

    double value = correct(s_mle);
    if (refine) value = correct(value);

    NoiseEstimate e;
    e.method = NoiseMethod::STAR;
    e.m_used = m;
    e.value = value;
    e.diagnostics["subcritical"] = static_cast<double>(subcritical);
    e.diagnostics["all_supercritical"] = subcritical == 0 ? 1.0 : 0.0;
    e.diagnostics["mle"] = s_mle;
    e.diagnostics["refined"] = refine ? 1.0 : 0.0;
    return e;
}

NoiseEstimate sigma2_passemier(const EigenSpectrum& spectrum, int m) {
    spectrum.validate();
    if (m < 0 || m >= spectrum.n)
        throw dimension_error("sigma2_passemier: need 0 <= m < N");
    const double c = spectrum.c_eff;
    const double s_tilde =
        tail_sum(spectrum.values, m) / static_cast<double>(spectrum.n - m);

    double sum_term = 0.0;
    int detected = 0;
    int subcritical = 0;
    if (m > 0 && s_tilde > 0.0) {
        SpectralLaw law(c, {{s_tilde, 1.0}});
        for (int k = 0; k < m; ++k) {
            try {
                const double alpha = spike_inverse(spectrum.values[k], law, s_tilde);
                sum_term += 1.0 / (alpha - 1.0);
                ++detected;
            } catch (const not_a_spike_error&) {
                ++subcritical;
            }
        }
    }
    NoiseEstimate e;
    e.method = NoiseMethod::P;
    e.m_used = m;
    e.value = s_tilde + c * s_tilde / (spectrum.n - m) * (detected + sum_term);
    e.diagnostics["subcritical"] = static_cast<double>(subcritical);
    return e;
}

NoiseEstimate sigma2_kn(const EigenSpectrum& spectrum, int m) {
    spectrum.validate();
    if (m < 0 || m >= spectrum.n)
        throw dimension_error("sigma2_kn: need 0 <= m < N");
    const auto& l = spectrum.values;
    const int n = spectrum.n;
    const double t = static_cast<double>(spectrum.t_eff);

    double sigma2 = tail_sum(l, m) / static_cast<double>(n - m);
    int degenerate = 0;
    int it = 0;
    for (; it < 1000; ++it) {
        double top = 0.0;
        degenerate = 0;
        for (int j = 0; j < m; ++j) {
            const double bq = l[j] + sigma2 - sigma2 * (n - m) / t;
            const double disc = bq * bq - 4.0 * l[j] * sigma2;
            double rho;
            if (disc < 0.0) {
                rho = 0.5 * bq;  // real part of the complex root pair
                ++degenerate;
            } else {
                rho = 0.5 * (bq + std::sqrt(disc));  // larger root
            }
            top += l[j] - rho;
        }
        const double next = (tail_sum(l, m) + top) / static_cast<double>(n - m);
        const double delta = std::abs(next - sigma2);
        sigma2 = next;
        if (delta <= 1e-10) break;
    }
    if (it >= 1000)
        throw numerical_error("sigma2_kn: alternating iteration did not converge");

    NoiseEstimate e;
    e.method = NoiseMethod::KN;
    e.m_used = m;
    e.value = sigma2;
    e.diagnostics["iterations"] = static_cast<double>(it);
    e.diagnostics["degenerate_roots"] = static_cast<double>(degenerate);
    return e;
}

double mp_median(double c) {
    if (c <= 0.0) throw input_error("mp_median: c must be positive");
    const double point_mass = c > 1.0 ? 1.0 - 1.0 / c : 0.0;
    if (point_mass >= 0.5)
        throw numerical_error("mp_median: median is zero for c >= 2");
    const double sc = std::sqrt(c);
    const double a = (1.0 - sc) * (1.0 - sc);
    const double b = (1.0 + sc) * (1.0 + sc);

    // CDF over the bulk via the substitution x = a + (b-a) sin^2(theta), which
    // removes the square-root edge singularities:
    //   f(x) dx = (b-a)^2 sin^2 cos^2 / (pi c x) dtheta.
    const auto bulk_cdf = [&](double theta_hi) {
        constexpr int kN = 2000;  // Simpson panels (even count)
        const double h = theta_hi / kN;
        double s = 0.0;
        for (int j = 0; j <= kN; ++j) {
            const double th = j * h;
            const double st = std::sin(th), ct = std::cos(th);
            const double x = a + (b - a) * st * st;
            double g;
            if (x <= 0.0) {
                // only reachable when a == 0 (c == 1); the limit is finite
                g = (b - a) * ct * ct / (std::numbers::pi * c);
            } else {
                g = (b - a) * (b - a) * st * st * ct * ct / (std::numbers::pi * c * x);
            }
            const double w = (j == 0 || j == kN) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            s += w * g;
        }
        return s * h / 3.0;
    };

    double lo = 0.0, hi = std::numbers::pi / 2.0;
    for (int itc = 0; itc < 100; ++itc) {
        const double mid = 0.5 * (lo + hi);
        if (point_mass + bulk_cdf(mid) < 0.5)
            lo = mid;
        else
            hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    const double st = std::sin(theta);
    return a + (b - a) * st * st;
}

NoiseEstimate sigma2_us(const EigenSpectrum& spectrum, int m) {
    spectrum.validate();
    if (m < 0 || m >= spectrum.n - 1)
        throw dimension_error("sigma2_us: need 0 <= m < N-1");
    std::vector<double> lower(spectrum.values.begin() + m, spectrum.values.end());
    NoiseEstimate e;
    e.method = NoiseMethod::US;
    e.m_used = m;
    e.value = median_of(std::move(lower)) / mp_median(spectrum.c_eff);
    return e;
}

NoiseEstimate sigma2_median(const PanelData& panel) {
    panel.validate();
    const Matrix xc = panel.row_demeaned();
    const double t = static_cast<double>(panel.t());
    std::vector<double> row_ms(panel.n());
    for (Eigen::Index i = 0; i < panel.n(); ++i)
        row_ms[i] = xc.row(i).squaredNorm() / t;
    NoiseEstimate e;
    e.method = NoiseMethod::MEDIAN;
    e.m_used = 0;
    e.value = median_of(std::move(row_ms));
    return e;
}

}  // namespace fc
