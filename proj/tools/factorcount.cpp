// factorcount: estimate the number of common factors in a large N x T panel
// via bias-corrected information criteria, and run the supporting
// noise-estimation and factor-count simulation studies.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "factorcount/criteria.hpp"
#include "factorcount/csv.hpp"
#include "factorcount/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string input_path;
    std::vector<int> m0_fixed;
    std::vector<double> m0_frac;
    std::string h_spectrum_path;
    int q = 1;
    double beta = 0.0;
    int reps = 200;
    std::uint64_t seed = 20240601;
    std::string out_dir = "factorcount_out";
    std::string emit = "csv,json,plotdata";
    std::string model = "M3";
    std::string population = "gaussian";
    std::vector<std::string> cells;
};

bool wants(const CommonOpts& o, const std::string& kind) {
    return o.emit.find(kind) != std::string::npos;
}

std::vector<fc::NonSpike> load_h_spectrum(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fc::input_error("cannot open H-spectrum file " + path);
    std::vector<fc::NonSpike> atoms;
    std::string line;
    while (std::getline(in, line)) {
        for (char& ch : line)
            if (ch == ',' || ch == '\t') ch = ' ';
        std::istringstream ss(line);
        double r, w;
        if (ss >> r >> w) atoms.push_back({r, w});
    }
    if (atoms.empty()) throw fc::input_error("H-spectrum file has no atoms: " + path);
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.r > b.r; });
    return atoms;
}

fc::Model parse_model(const std::string& s) {
    if (s == "M1") return fc::Model::M1;
    if (s == "M2") return fc::Model::M2;
    if (s == "M3") return fc::Model::M3;
    if (s == "M4") return fc::Model::M4;
    if (s == "M5") return fc::Model::M5;
    throw fc::input_error("unknown model: " + s);
}

fc::Population parse_population(const std::string& s) {
    if (s == "gaussian" || s == "Gaussian") return fc::Population::Gaussian;
    if (s == "gamma" || s == "Gamma") return fc::Population::Gamma;
    throw fc::input_error("unknown population: " + s);
}

std::vector<std::pair<int, int>> parse_cells(const std::vector<std::string>& cells) {
    std::vector<std::pair<int, int>> grid;
    for (const auto& c : cells) {
        const auto x = c.find('x');
        if (x == std::string::npos)
            throw fc::input_error("bad cell '" + c + "', expected NxT (e.g. 100x60)");
        grid.emplace_back(std::stoi(c.substr(0, x)), std::stoi(c.substr(x + 1)));
    }
    return grid;
}

std::string criterion_name(fc::Criterion c) {
    switch (c) {
        case fc::Criterion::PC1: return "PC_p1";
        case fc::Criterion::PC2: return "PC_p2";
        case fc::Criterion::PC3: return "PC_p3";
        case fc::Criterion::PCSTAR1: return "PCstar_p1";
        case fc::Criterion::PCSTAR2: return "PCstar_p2";
        case fc::Criterion::PCSTAR3: return "PCstar_p3";
    }
    return "?";
}

int cmd_estimate(const CommonOpts& o) {
    if (o.input_path.empty()) {
        std::cerr << "estimate: --input is required\n";
        return 1;
    }
    const fc::PanelData panel = fc::ingest_csv(o.input_path);
    const int n = static_cast<int>(panel.n());
    const int t = static_cast<int>(panel.t());

    std::vector<std::pair<std::string, int>> m0_list;
    for (int k : o.m0_fixed)
        m0_list.emplace_back("m0=" + std::to_string(k),
                             fc::choose_m0(n, t, fc::M0Mode::Fixed(k)));
    for (double f : o.m0_frac) {
        const int m0 = fc::choose_m0(n, t, fc::M0Mode::Fraction(f));
        m0_list.emplace_back("m0=" + std::to_string(m0), m0);
    }
    if (m0_list.empty())
        for (double f : {0.6, 0.7, 0.8}) {
            const int m0 = fc::choose_m0(n, t, fc::M0Mode::Fraction(f));
            m0_list.emplace_back("m0=" + std::to_string(m0), m0);
        }

    std::vector<fc::NonSpike> nonspikes = {{1.0, 1.0}};
    if (!o.h_spectrum_path.empty()) nonspikes = load_h_spectrum(o.h_spectrum_path);
    const fc::FourthMomentSpec moments{o.q, o.beta};

    fs::create_directories(o.out_dir);
    json report;
    report["command"] = "estimate";
    report["input"] = o.input_path;
    report["n"] = n;
    report["t"] = t;

    std::ofstream table;
    if (wants(o, "csv")) {
        table.open(fs::path(o.out_dir) / "table_estimate.csv");
        table << "m0,PC_p1,PC_p2,PC_p3,PCstar_p1,PCstar_p2,PCstar_p3\n";
    }
    std::ofstream plot;
    if (wants(o, "plotdata")) {
        plot.open(fs::path(o.out_dir) / "plot_criteria.tsv");
        plot << "series\tx\ty\n";
        plot.precision(12);
    }

    bool any_success = false;
    for (const auto& [label, m0] : m0_list) {
        json row;
        row["m0"] = m0;
        std::vector<std::string> cells(6, "x");
        try {
            const auto pc = fc::pc_original(panel, m0);
            const auto star = fc::pc_star(panel, m0, nonspikes, moments);
            for (int j = 0; j < 3; ++j) cells[j] = std::to_string(pc[j].m_hat);
            for (int j = 0; j < 3; ++j) cells[3 + j] = std::to_string(star[j].m_hat);
            for (const auto& rep : pc) {
                row["criteria"][criterion_name(rep.criterion)] = {
                    {"m_hat", rep.m_hat}, {"values", rep.values}};
                if (plot.is_open())
                    for (std::size_t m = 0; m < rep.values.size(); ++m)
                        plot << criterion_name(rep.criterion) << "/" << label << '\t'
                             << m << '\t' << rep.values[m] << '\n';
            }
            for (const auto& rep : star) {
                json noise = json::array();
                for (const auto& est : rep.noise_backing)
                    noise.push_back({{"m", est.m_used}, {"value", est.value}});
                row["criteria"][criterion_name(rep.criterion)] = {
                    {"m_hat", rep.m_hat},
                    {"values", rep.values},
                    {"penalty_scale", rep.penalty_scale},
                    {"noise", noise}};
                if (plot.is_open())
                    for (std::size_t m = 0; m < rep.values.size(); ++m)
                        plot << criterion_name(rep.criterion) << "/" << label << '\t'
                             << m << '\t' << rep.values[m] << '\n';
            }
            any_success = true;
        } catch (const std::exception& e) {
            row["error"] = e.what();
        }
        if (table.is_open()) {
            table << m0;
            for (const auto& c : cells) table << ',' << c;
            table << '\n';
        }
        report["rows"].push_back(row);
    }

    if (wants(o, "json")) {
        std::ofstream js(fs::path(o.out_dir) / "report.json");
        js << report.dump(2) << '\n';
    }
    if (!any_success) {
        std::cerr << "estimate: all m0 configurations failed\n";
        return 3;
    }
    std::cout << "estimate: wrote results to " << o.out_dir << "\n";
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    std::vector<std::pair<int, int>> grid = parse_cells(o.cells);
    if (grid.empty())
        grid = {{10, 50}, {10, 100}, {20, 100}, {100, 60}, {100, 100}, {200, 60}};

    const auto cells = fc::run_count_study(parse_model(o.model),
                                           parse_population(o.population), grid, 8,
                                           o.reps, o.seed);

    fs::create_directories(o.out_dir);
    json report;
    report["command"] = "simulate";
    report["model"] = o.model;
    report["population"] = o.population;
    report["replications"] = o.reps;
    report["seed"] = o.seed;

    std::ofstream table;
    if (wants(o, "csv")) {
        table.open(fs::path(o.out_dir) / "table_counts.csv");
        table << "N,T,PC_p1,PC_p2,PC_p3,PCstar_p1,PCstar_p2,PCstar_p3\n";
    }
    const char* names[6] = {"PC_p1", "PC_p2", "PC_p3",
                            "PCstar_p1", "PCstar_p2", "PCstar_p3"};
    for (const auto& cell : cells) {
        json jc;
        jc["n"] = cell.n;
        jc["t"] = cell.t;
        if (table.is_open()) table << cell.n << ',' << cell.t;
        for (const char* name : names) {
            const auto& s = cell.result.summary.at(name);
            jc["criteria"][name] = {{"mean", s.mean}, {"std", s.std_dev}};
            if (table.is_open()) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.2f(%.2f)", s.mean, s.std_dev);
                table << ',' << buf;
            }
        }
        if (table.is_open()) table << '\n';
        report["cells"].push_back(jc);
    }
    if (wants(o, "json")) {
        std::ofstream js(fs::path(o.out_dir) / "report.json");
        js << report.dump(2) << '\n';
    }
    std::cout << "simulate: wrote results to " << o.out_dir << "\n";
    return 0;
}

int cmd_noise_bench(const CommonOpts& o) {
    fs::create_directories(o.out_dir);
    json report;
    report["command"] = "noise-bench";
    report["replications"] = o.reps;
    report["seed"] = o.seed;

    std::ofstream table, plot;
    if (wants(o, "csv")) {
        table.open(fs::path(o.out_dir) / "table_noise_mae.csv");
        table << "model,population,c,N,T,mle,star,p,kn,us,median\n";
        table.precision(6);
    }
    if (wants(o, "plotdata")) {
        plot.open(fs::path(o.out_dir) / "plot_noise_mae.tsv");
        plot << "series\tx\ty\n";
        plot.precision(6);
    }

    struct Config {
        fc::Model model;
        fc::Population population;
        double c;
        std::vector<int> grid;
    };
    const std::vector<Config> configs = {
        {fc::Model::M1, fc::Population::Gaussian, 0.5,
         {50, 100, 150, 200, 250, 300, 350, 400}},
        {fc::Model::M2, fc::Population::Gamma, 0.5,
         {50, 100, 150, 200, 250, 300, 350, 400}},
        {fc::Model::M1, fc::Population::Gaussian, 1.5,
         {90, 150, 210, 270, 330, 390, 450, 510}},
        {fc::Model::M2, fc::Population::Gamma, 1.5,
         {90, 150, 210, 270, 330, 390, 450, 510}},
    };
    const char* methods[6] = {"mle", "star", "p", "kn", "us", "median"};

    for (const auto& cfg : configs) {
        const std::string model_name = cfg.model == fc::Model::M1 ? "M1" : "M2";
        const std::string pop_name =
            cfg.population == fc::Population::Gaussian ? "gaussian" : "gamma";
        const auto cells = fc::run_noise_study(cfg.model, cfg.population, cfg.c,
                                               cfg.grid, o.reps, o.seed);
        for (const auto& cell : cells) {
            json jc;
            jc["model"] = model_name;
            jc["population"] = pop_name;
            jc["c"] = cfg.c;
            jc["n"] = cell.n;
            jc["t"] = cell.t;
            if (table.is_open())
                table << model_name << ',' << pop_name << ',' << cfg.c << ','
                      << cell.n << ',' << cell.t;
            for (const char* name : methods) {
                const auto& s = cell.result.summary.at(name);
                jc["log10_mae"][name] = s.log10_mae;
                if (table.is_open()) table << ',' << s.log10_mae;
                if (plot.is_open())
                    plot << model_name << "/" << pop_name << "/c=" << cfg.c << "/"
                         << name << '\t' << cell.n << '\t' << s.log10_mae << '\n';
            }
            if (table.is_open()) table << '\n';
            report["cells"].push_back(jc);
        }
    }
    if (wants(o, "json")) {
        std::ofstream js(fs::path(o.out_dir) / "report.json");
        js << report.dump(2) << '\n';
    }
    std::cout << "noise-bench: wrote results to " << o.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factor-count estimation via bias-corrected information criteria"};
    app.require_subcommand(1);

    CommonOpts o;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--reps", o.reps, "Replication count")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Base RNG seed");
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--emit", o.emit, "Comma-set of csv,json,plotdata");
    };

    auto* est = app.add_subcommand("estimate", "Estimate factor count from a CSV panel");
    est->add_option("--input", o.input_path, "Input CSV path")->required();
    est->add_option("--m0", o.m0_fixed, "Fixed m0 (repeatable)");
    est->add_option("--m0-frac", o.m0_frac, "m0 as a fraction of N (repeatable)");
    est->add_option("--h-spectrum", o.h_spectrum_path,
                    "File of bulk atoms: lines of 'r,omega'");
    est->add_option("--q", o.q, "1 for real data, 0 for complex")
        ->check(CLI::Range(0, 1));
    est->add_option("--beta", o.beta, "Fourth-moment parameter beta");
    add_common(est);

    auto* sim = app.add_subcommand("simulate", "Factor-count Monte Carlo study");
    sim->add_option("--model", o.model, "M3, M4 or M5");
    sim->add_option("--population", o.population, "gaussian or gamma");
    sim->add_option("--cell", o.cells, "Grid cell NxT (repeatable)");
    add_common(sim);

    auto* nb = app.add_subcommand("noise-bench", "Noise-estimator MAE study");
    add_common(nb);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (est->parsed()) return cmd_estimate(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (nb->parsed()) return cmd_noise_bench(o);
        return 1;
    } catch (const fc::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const fc::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
