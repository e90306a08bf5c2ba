#pragma once

#include <utility>
#include <vector>

#include "factorcount/panel.hpp"

namespace fc {

// A spike: population eigenvalue sigma2 * alpha with multiplicity n_k.
struct Spike {
    double alpha;  // alpha_k, in units of sigma^2
    int multiplicity;
};

// A bulk atom: population eigenvalue sigma2 * r with asymptotic weight omega.
struct NonSpike {
    double r;
    double omega;
};

// Population description of a generalized spiked covariance:
//   spec(Sigma) = sigma^2 * (alpha_1 x n_1, ..., alpha_K x n_K,
//                            r_1 x ~omega_1*(N-M), ..., r_s x ~omega_s*(N-M)).
struct SpectrumSpec {
    std::vector<Spike> spikes;        // sorted strictly decreasing in alpha
    std::vector<NonSpike> nonspikes;  // sorted strictly decreasing in r
    double sigma2 = 1.0;

    SpectrumSpec() = default;
    SpectrumSpec(std::vector<Spike> s, std::vector<NonSpike> ns, double s2)
        : spikes(std::move(s)), nonspikes(std::move(ns)), sigma2(s2) {
        validate();
    }

    int total_spike_count() const {
        int m = 0;
        for (const auto& s : spikes) m += s.multiplicity;
        return m;
    }

    void validate() const;
};

// Fourth-moment parameters of the innovations xi:
//   q = 1 for real data, 0 for complex; beta = E|xi|^4 - q - 2.
struct FourthMomentSpec {
    int q = 1;
    double beta = 0.0;
};

// Sorted sample eigenvalues of the N x N sample covariance.
struct EigenSpectrum {
    std::vector<double> values;  // descending, length n
    int n = 0;
    int t_eff = 0;       // T if mean known, T-1 if mean estimated
    double c_eff = 0.0;  // n / t_eff

    EigenSpectrum() = default;
    EigenSpectrum(std::vector<double> v, int n_, int t_eff_);

    void validate() const;
};

// Eigenvalues of the sample covariance of a panel.
//   mean_known = true : S = (1/T) X X'        (t_eff = T)
//   mean_known = false: S = (1/(T-1)) Xc Xc'  (t_eff = T-1, rows demeaned)
EigenSpectrum sample_spectrum(const PanelData& panel, bool mean_known);

// The N population eigenvalues implied by a SpectrumSpec at finite dimension n:
// sigma^2*alpha_k repeated n_k times, then sigma^2*r_i repeated
// round(omega_i*(n-M)) times with the rounding remainder assigned to the
// largest-weight atom; sorted descending.
std::vector<double> population_eigenvalues(const SpectrumSpec& spec, int n);

}  // namespace fc
