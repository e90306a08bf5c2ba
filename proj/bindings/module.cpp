#include <pybind11/eigen.h>
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "factorcount/criteria.hpp"
#include "factorcount/csv.hpp"
#include "factorcount/simulate.hpp"

namespace py = pybind11;
using namespace fc;

namespace {

std::vector<NonSpike> to_nonspikes(const std::vector<std::pair<double, double>>& v) {
    std::vector<NonSpike> out;
    out.reserve(v.size());
    for (const auto& [r, w] : v) out.push_back({r, w});
    return out;
}

py::dict estimate_to_dict(const NoiseEstimate& e) {
    py::dict d;
    d["value"] = e.value;
    d["m_used"] = e.m_used;
    d["diagnostics"] = e.diagnostics;
    return d;
}

py::dict report_to_dict(const CriterionReport& r) {
    py::dict d;
    d["m_hat"] = r.m_hat;
    d["m0"] = r.m0;
    d["values"] = r.values;
    d["penalty_scale"] = r.penalty_scale;
    d["failed_m"] = r.failed_m;
    return d;
}

py::dict result_to_dict(const ReplicationResult& res) {
    py::dict d;
    d["replications"] = res.replications;
    d["elapsed_seconds"] = res.elapsed_seconds;
    py::dict est, summary;
    for (const auto& [name, vals] : res.estimates) est[name.c_str()] = vals;
    for (const auto& [name, s] : res.summary) {
        py::dict js;
        js["mean"] = s.mean;
        js["std"] = s.std_dev;
        js["log10_mae"] = s.log10_mae;
        summary[name.c_str()] = js;
    }
    d["estimates"] = est;
    d["summary"] = summary;
    d["failures"] = res.failures;
    return d;
}

Model parse_model(const std::string& s) {
    if (s == "M1") return Model::M1;
    if (s == "M2") return Model::M2;
    if (s == "M3") return Model::M3;
    if (s == "M4") return Model::M4;
    if (s == "M5") return Model::M5;
    throw input_error("unknown model: " + s);
}

Population parse_population(const std::string& s) {
    if (s == "gaussian") return Population::Gaussian;
    if (s == "gamma") return Population::Gamma;
    throw input_error("unknown population: " + s);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Factor-count estimation via bias-corrected information criteria";

    py::register_exception<input_error>(mod, "InputError", PyExc_ValueError);
    py::register_exception<numerical_error>(mod, "NumericalError", PyExc_RuntimeError);

    mod.def(
        "sample_spectrum",
        [](const Matrix& x, bool mean_known) {
            const EigenSpectrum s = sample_spectrum(PanelData(x), mean_known);
            return py::make_tuple(s.values, s.t_eff, s.c_eff);
        },
        py::arg("panel"), py::arg("mean_known") = false,
        "Eigenvalues (descending), t_eff and c_eff of the sample covariance.");

    mod.def(
        "population_eigenvalues",
        [](const std::vector<std::pair<double, int>>& spikes,
           const std::vector<std::pair<double, double>>& nonspikes, double sigma2,
           int n) {
            std::vector<Spike> sp;
            for (const auto& [a, k] : spikes) sp.push_back({a, k});
            return population_eigenvalues(SpectrumSpec(sp, to_nonspikes(nonspikes), sigma2), n);
        },
        py::arg("spikes"), py::arg("nonspikes"), py::arg("sigma2"), py::arg("n"));

    mod.def(
        "stieltjes_companion",
        [](std::complex<double> z, double c,
           const std::vector<std::pair<double, double>>& atoms) {
            return stieltjes_companion(z, SpectralLaw(c, atoms));
        },
        py::arg("z"), py::arg("c"), py::arg("h_atoms"));

    mod.def(
        "find_support",
        [](double c, const std::vector<std::pair<double, double>>& atoms) {
            std::vector<std::pair<double, double>> out;
            for (const auto& iv : find_support(SpectralLaw(c, atoms)))
                out.emplace_back(iv.lower, iv.upper);
            return out;
        },
        py::arg("c"), py::arg("h_atoms"));

    mod.def(
        "spike_forward",
        [](double alpha, double c, const std::vector<std::pair<double, double>>& atoms,
           double sigma2) { return spike_forward(alpha, SpectralLaw(c, atoms), sigma2); },
        py::arg("alpha"), py::arg("c"), py::arg("h_atoms"), py::arg("sigma2") = 1.0);

    mod.def(
        "spike_inverse",
        [](double lam, double c, const std::vector<std::pair<double, double>>& atoms,
           double sigma2) { return spike_inverse(lam, SpectralLaw(c, atoms), sigma2); },
        py::arg("lambda_obs"), py::arg("c"), py::arg("h_atoms"), py::arg("sigma2") = 1.0);

    mod.def(
        "mu_x",
        [](double c, const std::vector<std::pair<double, double>>& atoms, int q,
           double beta) { return mu_x(SpectralLaw(c, atoms, {q, beta})); },
        py::arg("c"), py::arg("h_atoms"), py::arg("q") = 1, py::arg("beta") = 0.0);

    mod.def(
        "sigma2_mle",
        [](const std::vector<double>& eigs, int t_eff, int m,
           const std::vector<std::pair<double, double>>& nonspikes) {
            EigenSpectrum s(eigs, static_cast<int>(eigs.size()), t_eff);
            return estimate_to_dict(sigma2_mle(s, m, to_nonspikes(nonspikes)));
        },
        py::arg("eigenvalues"), py::arg("t_eff"), py::arg("m"), py::arg("nonspikes"));

    mod.def(
        "sigma2_star",
        [](const std::vector<double>& eigs, int t_eff, int m,
           const std::vector<std::pair<double, double>>& nonspikes, int q, double beta,
           bool refine) {
            EigenSpectrum s(eigs, static_cast<int>(eigs.size()), t_eff);
            return estimate_to_dict(
                sigma2_star(s, m, to_nonspikes(nonspikes), {q, beta}, refine));
        },
        py::arg("eigenvalues"), py::arg("t_eff"), py::arg("m"), py::arg("nonspikes"),
        py::arg("q") = 1, py::arg("beta") = 0.0, py::arg("refine") = true);

    mod.def(
        "pca_objective",
        [](const Matrix& x, int m) { return pca_objective(PanelData(x), m); },
        py::arg("panel"), py::arg("m"));

    mod.def(
        "penalty",
        [](const std::string& which, int n, int t) {
            if (which == "g1") return penalty(Penalty::g1, n, t);
            if (which == "g2") return penalty(Penalty::g2, n, t);
            if (which == "g3") return penalty(Penalty::g3, n, t);
            throw input_error("penalty selector must be g1, g2 or g3");
        },
        py::arg("which"), py::arg("n"), py::arg("t"));

    mod.def(
        "pc_original",
        [](const Matrix& x, int m0) {
            py::dict out;
            for (const auto& rep : pc_original(PanelData(x), m0)) {
                const char* names[] = {"PC_p1", "PC_p2", "PC_p3"};
                out[names[static_cast<int>(rep.criterion)]] = report_to_dict(rep);
            }
            return out;
        },
        py::arg("panel"), py::arg("m0"));

    mod.def(
        "pc_star",
        [](const Matrix& x, int m0,
           const std::vector<std::pair<double, double>>& nonspikes, int q, double beta) {
            py::dict out;
            const char* names[] = {"PCstar_p1", "PCstar_p2", "PCstar_p3"};
            int j = 0;
            for (const auto& rep :
                 pc_star(PanelData(x), m0, to_nonspikes(nonspikes), {q, beta}))
                out[names[j++]] = report_to_dict(rep);
            return out;
        },
        py::arg("panel"), py::arg("m0"),
        py::arg("nonspikes") = std::vector<std::pair<double, double>>{{1.0, 1.0}},
        py::arg("q") = 1, py::arg("beta") = 0.0);

    mod.def(
        "choose_m0",
        [](int n, int t, py::object fixed, py::object fraction) {
            if (!fixed.is_none()) return choose_m0(n, t, M0Mode::Fixed(fixed.cast<int>()));
            if (!fraction.is_none())
                return choose_m0(n, t, M0Mode::Fraction(fraction.cast<double>()));
            throw input_error("choose_m0: provide fixed= or fraction=");
        },
        py::arg("n"), py::arg("t"), py::arg("fixed") = py::none(),
        py::arg("fraction") = py::none());

    mod.def(
        "generate_panel",
        [](const std::string& model, const std::string& population, int n, int t,
           double theta, std::uint64_t seed) {
            DgpSpec spec;
            spec.model = parse_model(model);
            spec.population = parse_population(population);
            spec.n = n;
            spec.t = t;
            spec.theta = theta;
            spec.seed = seed;
            return generate_panel(spec).values;
        },
        py::arg("model"), py::arg("population"), py::arg("n"), py::arg("t"),
        py::arg("theta") = 3.0, py::arg("seed") = 0);

    mod.def(
        "run_noise_study",
        [](const std::string& model, const std::string& population, double c,
           const std::vector<int>& n_grid, int replications, std::uint64_t base_seed) {
            py::list out;
            for (const auto& cell : run_noise_study(parse_model(model),
                                                    parse_population(population), c,
                                                    n_grid, replications, base_seed)) {
                py::dict d;
                d["n"] = cell.n;
                d["t"] = cell.t;
                d["result"] = result_to_dict(cell.result);
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("population"), py::arg("c"), py::arg("n_grid"),
        py::arg("replications"), py::arg("base_seed") = 0);

    mod.def(
        "run_count_study",
        [](const std::string& model, const std::string& population,
           const std::vector<std::pair<int, int>>& nt_grid, int m0, int replications,
           std::uint64_t base_seed) {
            py::list out;
            for (const auto& cell :
                 run_count_study(parse_model(model), parse_population(population),
                                 nt_grid, m0, replications, base_seed)) {
                py::dict d;
                d["n"] = cell.n;
                d["t"] = cell.t;
                d["result"] = result_to_dict(cell.result);
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("population"), py::arg("nt_grid"), py::arg("m0") = 8,
        py::arg("replications") = 200, py::arg("base_seed") = 0);

    mod.def(
        "ingest_csv",
        [](const std::string& path) { return ingest_csv(path).values; },
        py::arg("path"));
}
