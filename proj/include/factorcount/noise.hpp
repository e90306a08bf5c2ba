#pragma once

#include <map>
#include <string>

#include "factorcount/rmt.hpp"

namespace fc {

enum class NoiseMethod { MLE, STAR, P, KN, US, MEDIAN };

struct NoiseEstimate {
    double value = 0.0;
    NoiseMethod method = NoiseMethod::MLE;
    int m_used = 0;
    std::map<std::string, double> diagnostics;
};

// Plug-in maximum-likelihood style estimator:
//   value = (sum_{j>m} l_j) / ((N - m) * sum_i omega_i r_i).
NoiseEstimate sigma2_mle(const EigenSpectrum& spectrum, int m,
                         const std::vector<NonSpike>& nonspikes);

// Bias-corrected estimator:
//   value = sigma2_mle + (b(alpha_hat, sigma0^2) - mu_x) / ((N - m) sum omega_i r_i)
// where alpha_hat are the population spikes recovered from the top-m sample
// eigenvalues by inverting the spike map, and b, mu_x come from the limiting
// law.  One refinement pass (on by default) repeats the correction with the
// corrected value as the noise scale.  Candidate spikes below the detection
// threshold contribute zero to b and are counted in the "subcritical"
// diagnostic (see README for the rationale).
NoiseEstimate sigma2_star(const EigenSpectrum& spectrum, int m,
                          const std::vector<NonSpike>& nonspikes,
                          const FourthMomentSpec& moments, bool refine = true);

// White-bulk (H = delta_1) bias-corrected baseline:
//   value = s~ + (c*s~/(N-m)) * (M + sum_k n_k/(alpha_k - 1)).
NoiseEstimate sigma2_passemier(const EigenSpectrum& spectrum, int m);

// Signal-plus-noise alternating solver: sigma^2 and per-spike rho_j satisfy
//   sigma^2 = (1/(N-m)) { sum_{j>m} l_j + sum_{j<=m} (l_j - rho_j) }
//   rho_j^2 - rho_j (l_j + sigma^2 - sigma^2 (N-m)/T) + l_j sigma^2 = 0,
// with each rho_j the larger quadratic root.
NoiseEstimate sigma2_kn(const EigenSpectrum& spectrum, int m);

// Median-matching baseline: median of the lower N-m sample eigenvalues
// divided by the Marchenko-Pastur median at ratio c_eff.
NoiseEstimate sigma2_us(const EigenSpectrum& spectrum, int m);

// Per-series baseline: median over rows of the centered row mean squares
// (divisor T).
NoiseEstimate sigma2_median(const PanelData& panel);

// Median of the standard Marchenko-Pastur law with ratio c (unit scale),
// including the point mass 1 - 1/c at zero when c > 1.
double mp_median(double c);

// Cached, scale-aware evaluation support for sigma2_star: mu_x at unit noise
// scale for given (c, nonspikes, moments); mu_x scales linearly in the noise
// scale when every atom is multiplied by it.
double mu_x_unit_scale(double c, const std::vector<NonSpike>& nonspikes,
                       const FourthMomentSpec& moments);

}  // namespace fc
