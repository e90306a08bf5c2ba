#pragma once

#include <complex>
#include <vector>

#include "factorcount/spectrum.hpp"

namespace fc {

using Complex = std::complex<double>;

// Limiting spectral law ingredients: dimension ratio c, discrete bulk
// distribution H = sum_i w_i * delta(t_i), and fourth-moment parameters.
struct SpectralLaw {
    double c = 0.5;
    std::vector<std::pair<double, double>> h_atoms;  // (t_i, w_i)
    FourthMomentSpec moments;

    SpectralLaw() = default;
    SpectralLaw(double c_, std::vector<std::pair<double, double>> atoms,
                FourthMomentSpec mom = {});

    void validate() const;
};

struct SupportInterval {
    double lower = 0.0;
    double upper = 0.0;
};

// Companion Stieltjes transform: the unique solution m with
// Im(m) * Im(z) >= 0 of the Silverstein equation
//   z = -1/m + c * sum_i w_i t_i / (1 + t_i m).
// Solved by damped fixed-point iteration plus a Newton polish; the residual
// |z - z(m)| is at most 1e-12 * max(1, |z|).
Complex stieltjes_companion(Complex z, const SpectralLaw& law);

// Support interval(s) of the limiting sample-eigenvalue distribution,
// located from the critical points of z(m) on the real m-axis
// (endpoints accurate to ~1e-9).
std::vector<SupportInterval> find_support(const SpectralLaw& law);

// Phase-transition threshold: the smallest alpha (in bulk-atom units of the
// law scaled so sigma^2 = 1) at which a population spike separates from the
// bulk.  Spikes at or below this value are not detectable.
double spike_threshold(const SpectralLaw& law);

// Almost-sure limit of the top sample eigenvalue generated by population
// spike sigma2 * alpha:
//   psi(alpha) = sigma2 * alpha * (1 + c * sum_i w_i r_i / (alpha - r_i))
// where r_i = t_i / sigma2 are the bulk atoms in alpha's units.
// Throws subcritical_error when psi'(alpha) <= 0.
double spike_forward(double alpha, const SpectralLaw& law, double sigma2);

// Inverse of spike_forward by monotone bracketing; throws not_a_spike_error
// when lambda_obs does not exceed the scaled support edge.
double spike_inverse(double lambda_obs, const SpectralLaw& law, double sigma2);

// Bias term of the noise estimator's centering:
//   b = sum_k sum_i n_k * c * alpha_k * sigma2 * r_i * omega_i / (alpha_k - r_i).
double bias_b(const SpectrumSpec& spec, const SpectralLaw& law);

// Asymptotic mean mu_x of the CLT for the scaled noise-estimator error,
// evaluated as two closed-contour integrals of smooth functionals of the
// companion Stieltjes transform (trapezoid quadrature over a rectangle
// enclosing the support; node count doubled until 1e-8 agreement).
double mu_x(const SpectralLaw& law);

// As above with the contour margin (and half-height floor) scaled by
// margin_factor; mu_x(law) == mu_x(law, 1.0).  Exposed so the
// contour-independence property can be asserted.
double mu_x(const SpectralLaw& law, double margin_factor);

namespace detail {
// Shared helpers used across modules.
double psi_of_alpha(double alpha, double c,
                    const std::vector<std::pair<double, double>>& atoms);
}  // namespace detail

}  // namespace fc
