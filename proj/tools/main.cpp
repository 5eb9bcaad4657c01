// Command-line front end: simulation studies, single-dataset imputation, and
// result-table reporting.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustsq/estimators.hpp"
#include "robustsq/harness.hpp"
#include "robustsq/io.hpp"
#include "robustsq/uncertainty.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitInvalidated = 3;

int default_jobs() {
    if (const char* env = std::getenv("ROBUSTSQ_JOBS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = robustsq::detail::trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct SimulateOptions {
    std::string scenario = "linear", methods, regimes, uncertainty, preset, config_file;
    std::string out = "results.csv", format = "csv";
    long long n = 1000;
    int replicates = 100, resamples = -1, trees = -1, burn = -1, draws = -1;
    int knots = -1, degree = -1, jobs = default_jobs();
    unsigned long long seed = 0;
    bool have_seed = false;
};

int run_simulate(const SimulateOptions& opt, const CLI::App& cmd) {
    robustsq::RunConfig cfg;
    robustsq::ExperimentSpec& ex = cfg.experiment;
    if (opt.preset == "paper") {
        ex.bart = robustsq::BartConfig{};
        ex.replicates = 500;
        ex.resamples = 200;
    } else if (opt.preset == "desk" || opt.preset.empty()) {
        ex.bart = robustsq::BartConfig::desk();
        ex.resamples = 50;
    } else {
        throw robustsq::ConfigError("unknown preset '" + opt.preset + "' (desk|paper)");
    }
    if (!opt.config_file.empty()) robustsq::apply_config_file(opt.config_file, cfg);

    // Flags override the preset and the config file.
    const auto set = [&](const std::string& flag) { return cmd.count(flag) > 0; };
    if (set("--scenario")) ex.scenario = robustsq::parse_scenario(opt.scenario);
    if (set("--n")) ex.n = opt.n;
    if (set("--replicates")) ex.replicates = opt.replicates;
    if (set("--methods")) {
        ex.methods.clear();
        for (const auto& name : split_list(opt.methods))
            ex.methods.push_back(robustsq::parse_method(name));
    }
    if (set("--regimes")) {
        ex.regimes.clear();
        for (const auto& name : split_list(opt.regimes))
            ex.regimes.push_back(robustsq::parse_regime(name));
    }
    if (set("--uncertainty")) ex.uncertainty = robustsq::parse_uncertainty(opt.uncertainty);
    if (set("--resamples")) ex.resamples = opt.resamples;
    if (set("--trees")) ex.bart.num_trees = opt.trees;
    if (set("--burn")) ex.bart.burn_in = opt.burn;
    if (set("--draws")) ex.bart.num_draws = opt.draws;
    if (set("--knots")) ex.knot_count = opt.knots;
    if (set("--degree")) ex.degree = opt.degree;
    if (opt.have_seed) ex.seed = opt.seed;
    if (set("--jobs")) ex.jobs = opt.jobs;
    if (set("--out")) cfg.out_path = opt.out;
    if (set("--format")) cfg.format = opt.format;
    ex.bart.validate();
    if (ex.n < 10) throw robustsq::ConfigError("n must be >= 10");
    if (ex.replicates < 2) throw robustsq::ConfigError("replicates must be >= 2");
    if (ex.methods.empty() || ex.regimes.empty())
        throw robustsq::ConfigError("methods and regimes must be non-empty");

    std::cerr << robustsq::config_echo(cfg) << "\n";
    const robustsq::ExperimentResult result = robustsq::run_experiment(
        ex, [](const std::string& msg) { std::cerr << msg << "\n"; });
    robustsq::emit_results(result.rows, cfg.format, cfg.out_path);
    std::cerr << "wrote " << cfg.out_path << "\n";
    if (result.invalid) {
        std::cerr << "run invalidated: a cell exceeded the 10% replicate-failure cap\n";
        return kExitInvalidated;
    }
    return kExitOk;
}

struct ImputeOptions {
    std::string data_path, outcome = "y", response, method = "pspp", uncertainty = "bootstrap";
    int resamples = 50, knots = 20, degree = 1, trees = 50, burn = 100, draws = 200;
    unsigned long long seed = 20240817;
    bool two_part = false;
};

int run_impute(const ImputeOptions& opt) {
    using namespace robustsq;
    const LoadedDataset loaded = load_dataset(opt.data_path, opt.outcome, opt.response);
    const Dataset& data = loaded.data;
    BartConfig bart = BartConfig::desk();
    bart.num_trees = opt.trees;
    bart.burn_in = opt.burn;
    bart.num_draws = opt.draws;
    bart.validate();

    // Linear term per covariate for both model roles.
    std::vector<Term> terms;
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) terms.push_back({static_cast<int>(j)});
    std::vector<int> all_cols;
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) all_cols.push_back(static_cast<int>(j));

    const Method method = parse_method(opt.method);
    const UncertaintyMode umode = parse_uncertainty(opt.uncertainty);
    RngStream rng(opt.seed, 0);

    double point = 0.0;
    bool have_interval = false;
    IntervalEstimate interval;

    if (opt.two_part) {
        PipelineMethod pm;
        switch (method) {
            case Method::pspp: pm = PipelineMethod::pspp; break;
            case Method::aipwt: pm = PipelineMethod::aipwt; break;
            case Method::psbpp: pm = PipelineMethod::psbpp; break;
            case Method::bartps: pm = PipelineMethod::bartps; break;
            default:
                throw ConfigError("--two-part supports pspp, aipwt, psbpp, bartps only");
        }
        RngStream sub = rng.substream(1);
        point = two_part_boxcox_pipeline(data, pm, bart, sub, opt.knots, opt.degree).mu_hat;
    } else {
        ExperimentSpec spec;
        spec.bart = bart;
        spec.knot_count = opt.knots;
        spec.degree = opt.degree;
        spec.uncertainty = umode;
        spec.resamples = opt.resamples;
        Regime regime{RegimeTag::both_correct, terms, terms};
        SimBundle bundle{data, data.y};
        if (method == Method::bd) throw ConfigError("BD needs pre-deletion outcomes; not available for user data");
        RngStream cell_rng = rng.substream(1);
        const CellResult cell = compute_cell(method, bundle, regime, all_cols, spec, cell_rng);
        point = cell.point;
        have_interval = cell.has_interval;
        interval = cell.interval;
    }

    nlohmann::ordered_json out;
    out["method"] = to_string(method);
    out["n"] = data.n();
    out["observed"] = data.observed_count();
    out["estimate"] = point;
    if (have_interval) {
        out["lower"] = interval.lower;
        out["upper"] = interval.upper;
        out["interval_method"] = interval.method;
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw robustsq::DataError("report: cannot open " + path);
    std::vector<std::vector<std::string>> table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (robustsq::detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        table.push_back(std::move(cells));
    }
    if (table.empty()) throw robustsq::DataError("report: empty file " + path);
    std::vector<std::size_t> width(table[0].size(), 0);
    for (const auto& row : table)
        for (std::size_t j = 0; j < row.size() && j < width.size(); ++j)
            width[j] = std::max(width[j], row[j].size());
    for (const auto& row : table) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::cout << row[j];
            if (j + 1 < row.size())
                std::cout << std::string(width[j] - row[j].size() + 2, ' ');
        }
        std::cout << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doubly robust and BART-augmented estimators of a population mean under MAR missingness"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a simulation study grid");
    simulate->add_option("--scenario", sim.scenario, "linear | quadratic | ks");
    simulate->add_option("--n", sim.n, "sample size per replicate");
    simulate->add_option("--replicates", sim.replicates, "number of replicates");
    simulate->add_option("--methods", sim.methods, "comma list (BD,CC,MLR,PSPP,AIPWT,PSBPP,AIPWT-BART,BART,BARTps)");
    simulate->add_option("--regimes", sim.regimes, "comma list (both-correct,prop-correct,mean-correct,both-wrong)");
    simulate->add_option("--uncertainty", sim.uncertainty, "none | bootstrap | mi-mean | mi-draw");
    simulate->add_option("--resamples", sim.resamples, "bootstrap resamples / imputations D");
    simulate->add_option("--trees", sim.trees, "BART trees m");
    simulate->add_option("--burn", sim.burn, "BART burn-in sweeps");
    simulate->add_option("--draws", sim.draws, "BART retained draws");
    simulate->add_option("--knots", sim.knots, "spline knot count H");
    simulate->add_option("--degree", sim.degree, "spline degree L");
    simulate->add_option("--seed", sim.seed, "RNG seed")->each([&](const std::string&) { sim.have_seed = true; });
    simulate->add_option("--jobs", sim.jobs, "worker threads (default $ROBUSTSQ_JOBS or 1)");
    simulate->add_option("--preset", sim.preset, "desk | paper (chain sizes and D)");
    simulate->add_option("--config", sim.config_file, "JSON config file (flags override)");
    simulate->add_option("--out", sim.out, "output path");
    simulate->add_option("--format", sim.format, "csv | json");

    ImputeOptions imp;
    CLI::App* impute = app.add_subcommand("impute", "Estimate the outcome mean on a CSV dataset");
    impute->add_option("--data", imp.data_path, "CSV with header")->required();
    impute->add_option("--outcome", imp.outcome, "outcome column name");
    impute->add_option("--response", imp.response, "0/1 response column (default: derived from NA outcomes)");
    impute->add_option("--method", imp.method, "estimator");
    impute->add_option("--uncertainty", imp.uncertainty, "none | bootstrap | mi-mean | mi-draw");
    impute->add_option("--resamples", imp.resamples, "D");
    impute->add_option("--knots", imp.knots, "spline knot count H");
    impute->add_option("--degree", imp.degree, "spline degree L");
    impute->add_option("--trees", imp.trees, "BART trees m");
    impute->add_option("--burn", imp.burn, "BART burn-in sweeps");
    impute->add_option("--draws", imp.draws, "BART retained draws");
    impute->add_option("--seed", imp.seed, "RNG seed");
    impute->add_flag("--two-part", imp.two_part, "semicontinuous two-part Box-Cox pipeline");

    std::string report_path;
    CLI::App* report = app.add_subcommand("report", "Pretty-print a results CSV");
    report->add_option("path", report_path, "results CSV")->required();

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(sim, *simulate);
        if (impute->parsed()) return run_impute(imp);
        return run_report(report_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const robustsq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const robustsq::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
