#include "factorcount/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fc {

namespace {

constexpr double kPi = std::numbers::pi;

// z(m) = -1/m + c * sum_i w_i t_i / (1 + t_i m) on the real m-axis.
double z_of_m(double m, const SpectralLaw& law) {
    double s = 0.0;
    for (const auto& [t, w] : law.h_atoms) s += w * t / (1.0 + t * m);
    return -1.0 / m + law.c * s;
}

// z'(m) = 1/m^2 - c * sum_i w_i t_i^2 / (1 + t_i m)^2.
double zprime_of_m(double m, const SpectralLaw& law) {
    double s = 0.0;
    for (const auto& [t, w] : law.h_atoms) {
        const double d = 1.0 + t * m;
        s += w * t * t / (d * d);
    }
    return 1.0 / (m * m) - law.c * s;
}

// Bisection for a zero of z'(m) inside a bracket with a known sign change.
double bisect_zprime(double lo, double hi, const SpectralLaw& law) {
    double flo = zprime_of_m(lo, law);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = zprime_of_m(mid, law);
        if ((flo > 0.0) == (fm > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

// Scan an open interval (a, b) of the real m-axis for zeros of z'(m), using a
// grid clustered toward both ends (z' diverges at the poles bounding the
// interval).  Appends the critical values z(m*) to `edges`.
void scan_interval(double a, double b, const SpectralLaw& law,
                   std::vector<double>& edges) {
    constexpr int kGrid = 4096;
    double prev_m = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (int j = 1; j < kGrid; ++j) {
        // Chebyshev-style clustering at both endpoints.
        const double s = 0.5 * (1.0 - std::cos(kPi * j / kGrid));
        const double m = a + (b - a) * s;
        const double f = zprime_of_m(m, law);
        if (have_prev && (prev_f > 0.0) != (f > 0.0)) {
            const double mstar = bisect_zprime(prev_m, m, law);
            edges.push_back(z_of_m(mstar, law));
        }
        prev_m = m;
        prev_f = f;
        have_prev = true;
    }
}

// Same scan over an unbounded interval, parameterized by m = anchor + dir*e^u.
void scan_unbounded(double anchor, double dir, const SpectralLaw& law,
                    std::vector<double>& edges) {
    constexpr int kGrid = 4096;
    double prev_m = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (int j = 0; j < kGrid; ++j) {
        const double u = -34.0 + 70.0 * j / (kGrid - 1);
        const double m = anchor + dir * std::exp(u);
        const double f = zprime_of_m(m, law);
        if (have_prev && (prev_f > 0.0) != (f > 0.0)) {
            const double lo = std::min(prev_m, m), hi = std::max(prev_m, m);
            const double mstar = bisect_zprime(lo, hi, law);
            edges.push_back(z_of_m(mstar, law));
        }
        prev_m = m;
        prev_f = f;
        have_prev = true;
    }
}

// psi'(alpha) for the spike map psi(alpha) = alpha + c*alpha*sum w r/(alpha-r).
double psi_prime(double alpha, double c,
                 const std::vector<std::pair<double, double>>& atoms) {
    double s1 = 0.0, s2 = 0.0;
    for (const auto& [r, w] : atoms) {
        const double d = alpha - r;
        s1 += w * r / d;
        s2 += w * r / (d * d);
    }
    return 1.0 + c * s1 - c * alpha * s2;
}

double threshold_impl(double c, const std::vector<std::pair<double, double>>& atoms) {
    double rmax = 0.0;
    for (const auto& [r, w] : atoms) rmax = std::max(rmax, r);
    double lo = rmax * (1.0 + 1e-12);
    double hi = rmax * 2.0;
    while (psi_prime(hi, c, atoms) <= 0.0) {
        hi *= 2.0;
        if (hi > rmax * 1e12)
            throw numerical_error("spike_threshold: bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi_prime(mid, c, atoms) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

namespace detail {
double psi_of_alpha(double alpha, double c,
                    const std::vector<std::pair<double, double>>& atoms) {
    double s = 0.0;
    for (const auto& [r, w] : atoms) s += w * r / (alpha - r);
    return alpha + c * alpha * s;
}
}  // namespace detail

SpectralLaw::SpectralLaw(double c_, std::vector<std::pair<double, double>> atoms,
                         FourthMomentSpec mom)
    : c(c_), h_atoms(std::move(atoms)), moments(mom) {
    validate();
}

void SpectralLaw::validate() const {
    if (c <= 0.0) throw input_error("SpectralLaw: c must be positive");
    if (h_atoms.empty()) throw input_error("SpectralLaw: need at least one atom");
    double wsum = 0.0;
    for (std::size_t i = 0; i < h_atoms.size(); ++i) {
        if (h_atoms[i].first <= 0.0) throw input_error("SpectralLaw: atoms must be positive");
        if (h_atoms[i].second <= 0.0 || h_atoms[i].second > 1.0)
            throw input_error("SpectralLaw: weights must lie in (0, 1]");
        for (std::size_t j = 0; j < i; ++j)
            if (h_atoms[i].first == h_atoms[j].first)
                throw input_error("SpectralLaw: atoms must be distinct");
        wsum += h_atoms[i].second;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw input_error("SpectralLaw: weights must sum to 1");
    if (moments.q != 0 && moments.q != 1)
        throw input_error("SpectralLaw: q must be 0 or 1");
}

Complex stieltjes_companion(Complex z, const SpectralLaw& law) {
    law.validate();
    if (z == Complex(0.0, 0.0))
        throw input_error("stieltjes_companion: z must be nonzero");

    const auto g = [&](Complex m) {
        Complex s = 0.0;
        for (const auto& [t, w] : law.h_atoms) s += w * t / (1.0 + t * m);
        return 1.0 / (law.c * s - z);
    };

    // Damped fixed point m <- (1-eta) m + eta g(m), eta = 1/2, from m = -1/z.
    Complex m = -1.0 / z;
    constexpr int kCap = 500;
    for (int it = 0; it < kCap; ++it) {
        const Complex next = 0.5 * m + 0.5 * g(m);
        if (std::abs(next - m) < 1e-14 * std::max(1.0, std::abs(m))) {
            m = next;
            break;
        }
        m = next;
    }

    // Newton polish on f(m) = -1/m + c*sum - z.
    for (int it = 0; it < 64; ++it) {
        Complex s = 0.0, sp = 0.0;
        for (const auto& [t, w] : law.h_atoms) {
            const Complex d = 1.0 + t * m;
            s += w * t / d;
            sp += w * t * t / (d * d);
        }
        const Complex f = -1.0 / m + law.c * s - z;
        const Complex fp = 1.0 / (m * m) - law.c * sp;
        const Complex step = f / fp;
        m -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(m))) break;
    }

    Complex s = 0.0;
    for (const auto& [t, w] : law.h_atoms) s += w * t / (1.0 + t * m);
    const double resid = std::abs(-1.0 / m + law.c * s - z);
    if (resid > 1e-12 * std::max(1.0, std::abs(z)))
        throw numerical_error("stieltjes_companion: non-convergence", resid);
    if (m.imag() * z.imag() < -1e-10 * std::abs(m))
        throw numerical_error("stieltjes_companion: wrong branch");
    return m;
}

std::vector<SupportInterval> find_support(const SpectralLaw& law) {
    law.validate();

    // Poles of z(m) at m = -1/t_i, sorted ascending (most negative first).
    std::vector<double> poles;
    for (const auto& [t, w] : law.h_atoms) poles.push_back(-1.0 / t);
    std::sort(poles.begin(), poles.end());

    std::vector<double> edges;
    scan_unbounded(poles.front(), -1.0, law, edges);  // (-inf, leftmost pole)
    for (std::size_t i = 0; i + 1 < poles.size(); ++i)
        scan_interval(poles[i], poles[i + 1], law, edges);
    scan_interval(poles.back(), 0.0, law, edges);
    scan_unbounded(0.0, +1.0, law, edges);  // (0, +inf), relevant when c > 1

    // Support boundaries are the positive critical values, paired in order.
    std::vector<double> pos;
    for (double e : edges)
        if (e > 0.0) pos.push_back(e);
    std::sort(pos.begin(), pos.end());
    if (pos.empty())
        throw numerical_error("find_support: no critical points found");
    // At c = 1 the lowest edge degenerates to 0, which is not a critical
    // value of z(m); an odd count signals that implicit edge.
    if (pos.size() % 2 != 0) pos.insert(pos.begin(), 0.0);

    std::vector<SupportInterval> out;
    for (std::size_t i = 0; i < pos.size(); i += 2)
        out.push_back({pos[i], pos[i + 1]});
    // Merge intervals that touch to numerical precision.
    std::vector<SupportInterval> merged;
    for (const auto& iv : out) {
        if (!merged.empty() && iv.lower - merged.back().upper <
                                   1e-9 * std::max(1.0, iv.lower))
            merged.back().upper = iv.upper;
        else
            merged.push_back(iv);
    }
    return merged;
}

double spike_threshold(const SpectralLaw& law) {
    law.validate();
    return threshold_impl(law.c, law.h_atoms);
}

double spike_forward(double alpha, const SpectralLaw& law, double sigma2) {
    law.validate();
    if (sigma2 <= 0.0) throw input_error("spike_forward: sigma2 must be positive");
    std::vector<std::pair<double, double>> rs;
    rs.reserve(law.h_atoms.size());
    for (const auto& [t, w] : law.h_atoms) rs.emplace_back(t / sigma2, w);
    const double th = threshold_impl(law.c, rs);
    if (alpha <= th)
        throw subcritical_error("spike_forward: alpha below detection threshold");
    return sigma2 * detail::psi_of_alpha(alpha, law.c, rs);
}

double spike_inverse(double lambda_obs, const SpectralLaw& law, double sigma2) {
    law.validate();
    if (sigma2 <= 0.0) throw input_error("spike_inverse: sigma2 must be positive");
    std::vector<std::pair<double, double>> rs;
    rs.reserve(law.h_atoms.size());
    for (const auto& [t, w] : law.h_atoms) rs.emplace_back(t / sigma2, w);
    const double th = threshold_impl(law.c, rs);

    const auto f = [&](double a) {
        return sigma2 * detail::psi_of_alpha(a, law.c, rs) - lambda_obs;
    };
    double lo = th * (1.0 + 1e-10);
    if (f(lo) >= 0.0)
        throw not_a_spike_error("spike_inverse: observation inside the bulk support");
    double hi = std::max(2.0 * lambda_obs / sigma2, 2.0 * lo);
    int guard = 0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 200)
            throw numerical_error("spike_inverse: bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * std::max(1.0, mid)) break;
    }
    return 0.5 * (lo + hi);
}

double bias_b(const SpectrumSpec& spec, const SpectralLaw& law) {
    spec.validate();
    law.validate();
    double b = 0.0;
    for (const auto& sp : spec.spikes) {
        for (const auto& ns : spec.nonspikes) {
            const double d = sp.alpha - ns.r;
            if (std::abs(d) < 1e-14 * std::max(1.0, sp.alpha))
                throw singularity_error("bias_b: spike coincides with a bulk atom");
            b += sp.multiplicity * law.c * sp.alpha * spec.sigma2 * ns.r * ns.omega / d;
        }
    }
    return b;
}

double mu_x(const SpectralLaw& law) { return mu_x(law, 1.0); }

double mu_x(const SpectralLaw& law, double margin_factor) {
    law.validate();
    if (margin_factor <= 0.0) throw input_error("mu_x: margin_factor must be positive");
    const int q = law.moments.q;
    const double beta = law.moments.beta;
    if (q == 0 && beta == 0.0) return 0.0;

    const auto support = find_support(law);
    const double lo_s = support.front().lower;
    const double hi_s = support.back().upper;
    const double delta = margin_factor * 0.1 * (hi_s - lo_s);
    const double v = std::max(margin_factor * 0.5, delta);
    const double lo = lo_s - delta;
    const double hi = hi_s + delta;

    // Both contour integrands as functions of m = companion transform at z.
    const auto integrands = [&](Complex z, Complex& f1, Complex& f2) {
        const Complex m = stieltjes_companion(z, law);
        Complex i1 = 0.0, i2 = 0.0, i3 = 0.0, i4 = 0.0;
        for (const auto& [t, w] : law.h_atoms) {
            const Complex d = 1.0 + t * m;
            i1 += w * t / d;
            i2 += w * t * t / (d * d * d);
            i3 += w * t * t / (d * d);
            i4 += w / (d * d);
        }
        const Complex mm = m * m;
        const Complex dd = 1.0 - law.c * mm * i3;
        f1 = law.c * mm * (law.c * m * i1 - 1.0) * i2 / (dd * dd);
        f2 = mm * (-1.0 + law.c * m * i1) * i1 * i4 / dd;
    };

    // Composite Simpson rule per rectangle side (the integrand is analytic in
    // a neighborhood of each straight side), counterclockwise, with node
    // doubling until two successive totals agree to 1e-8.
    const auto evaluate = [&](int per_side, Complex& j1, Complex& j2) {
        const Complex corners[5] = {
            {lo, -v}, {hi, -v}, {hi, v}, {lo, v}, {lo, -v}};
        j1 = 0.0;
        j2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            const Complex dz = (corners[k + 1] - corners[k]) /
                               static_cast<double>(per_side);
            Complex s1 = 0.0, s2 = 0.0;
            for (int j = 0; j <= per_side; ++j) {
                Complex f1, f2;
                integrands(corners[k] + dz * static_cast<double>(j), f1, f2);
                const double w =
                    (j == 0 || j == per_side) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
                s1 += w * f1;
                s2 += w * f2;
            }
            j1 += s1 * dz / 3.0;
            j2 += s2 * dz / 3.0;
        }
    };

    const Complex two_pi_i(0.0, 2.0 * kPi);
    Complex prev1, prev2;
    evaluate(64, prev1, prev2);
    Complex cur1 = prev1, cur2 = prev2;
    bool converged = false;
    for (int per_side = 128; per_side <= (1 << 14) / 4; per_side *= 2) {
        evaluate(per_side, cur1, cur2);
        const double diff =
            std::abs((-static_cast<double>(q) * (cur1 - prev1) -
                      beta * law.c * (cur2 - prev2)) / two_pi_i);
        if (diff <= 1e-8) {
            converged = true;
            break;
        }
        prev1 = cur1;
        prev2 = cur2;
    }
    if (!converged)
        throw numerical_error("mu_x: quadrature did not converge");

    const Complex total =
        -static_cast<double>(q) / two_pi_i * cur1 - beta * law.c / two_pi_i * cur2;
    if (std::abs(total.imag()) > 1e-6)
        throw numerical_error("mu_x: residual imaginary part too large",
                              std::abs(total.imag()));
    return total.real();
}

}  // namespace fc
