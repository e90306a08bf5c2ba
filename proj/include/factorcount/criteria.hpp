#pragma once

#include "factorcount/noise.hpp"

namespace fc {

enum class Criterion { PC1, PC2, PC3, PCSTAR1, PCSTAR2, PCSTAR3 };

enum class Penalty { g1, g2, g3 };

// Estimated factor basis from the T x T Gram eigenproblem: F has T rows and
// m columns with F'F/T = I_m; loadings = X F / T.
struct FactorBasis {
    Matrix factors;   // T x m
    Matrix loadings;  // N x m
};

struct CriterionReport {
    Criterion criterion;
    std::vector<double> values;  // index m = 0..m0
    int m_hat = 0;
    int m0 = 0;
    std::vector<NoiseEstimate> noise_backing;
    std::vector<int> failed_m;   // candidate m excluded from the argmin
    double penalty_scale = 0.0;  // noise scale multiplying m * g_j
};

// Mode for choosing the maximum candidate factor count m0.
struct M0Mode {
    bool is_fraction = false;
    int fixed = 8;
    double fraction = 0.7;

    static M0Mode Fixed(int k) { return {false, k, 0.0}; }
    static M0Mode Fraction(double f) { return {true, 0, f}; }
};

// Estimated factor basis for the top-m principal components of the
// row-demeaned panel.
FactorBasis estimate_factors(const PanelData& panel, int m);

// PCA objective V(m): mean squared residual after removing the top-m
// principal components; equals (1/N) * sum_{j>m} eigenvalues of (1/T) X X'.
double pca_objective(const PanelData& panel, int m);

// Penalty functions (C^2 = min(N, T)):
//   g1 = ((N+T)/(NT)) ln(NT/(N+T)),  g2 = ((N+T)/(NT)) ln C^2,  g3 = ln(C^2)/C^2.
double penalty(Penalty which, int n, int t);

// Original information criteria PC_pj(m) = V(m) + m * V(m0) * g_j;
// returns reports for PC1..PC3.  Ties in the argmin go to the smaller m.
std::vector<CriterionReport> pc_original(const PanelData& panel, int m0);

// Bias-corrected criteria PC*_pj(m) = sigma2_star(m) + m * scale * g_j on the
// unknown-mean sample spectrum.  The penalty scale is sigma2_star(m0) when
// every one of the top-m0 candidate spikes is super-critical, and falls back
// to the uncorrected sigma2_mle(m0) otherwise (when candidates beyond the
// true factor count are bulk eigenvalues, the spike correction at m0 is not
// meaningful).  Returns reports for PCSTAR1..PCSTAR3.
std::vector<CriterionReport> pc_star(const PanelData& panel, int m0,
                                     const std::vector<NonSpike>& nonspikes,
                                     const FourthMomentSpec& moments);

// Same as pc_star but starting from a precomputed unknown-mean spectrum
// (avoids recomputing the eigendecomposition in replication drivers).
std::vector<CriterionReport> pc_star_from_spectrum(
    const EigenSpectrum& spectrum, int m0,
    const std::vector<NonSpike>& nonspikes, const FourthMomentSpec& moments);

// Choose m0: fixed(k) -> k; fraction(f) -> round(f*n), clamped to
// [1, min(n, t) - 1].
int choose_m0(int n, int t, const M0Mode& mode);

}  // namespace fc
