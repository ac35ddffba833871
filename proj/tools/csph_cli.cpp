// Command-line front end: simulate, fit, risk, dependence, eval, validate.
// Exit codes: 0 success, 2 input/validation error, 3 numerical or fit failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "csph/conditional.hpp"
#include "csph/errors.hpp"
#include "csph/fit.hpp"
#include "csph/io.hpp"
#include "csph/model.hpp"
#include "csph/risk.hpp"
#include "csph/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

csph::CSPHModel load_validated(const std::string& path) {
    csph::CSPHModel m = csph::load_model(path);
    csph::validate(m);
    return m;
}

int cmd_simulate(const std::string& model_file, std::size_t n, std::uint64_t seed,
                 const std::string& out, bool latent) {
    const csph::CSPHModel m = load_validated(model_file);
    const auto records = csph::sample_dataset(m, n, seed);
    csph::write_dataset_csv(out, records, latent);
    std::cout << "wrote " << records.size() << " records to " << out << "\n";
    return kExitOk;
}

int cmd_fit(const std::string& data_file, int p0, int p1, bool log_transform,
            double lower, bool has_lower, const csph::FitOptions& options,
            bool estimate_alpha, const std::string& out) {
    csph::BivariateDataset data = csph::read_dataset_csv(data_file);
    if (log_transform) {
        for (auto* col : {&data.x1, &data.x2}) {
            for (double& v : *col) {
                if (v <= 0.0) {
                    std::cerr << "fit: nonpositive observation " << v
                              << " cannot be log-transformed\n";
                    return kExitInput;
                }
                v = std::log(v);
            }
        }
    }
    if (has_lower) {
        csph::BivariateDataset kept;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.x1[i] > lower && data.x2[i] > lower) {
                kept.x1.push_back(data.x1[i]);
                kept.x2.push_back(data.x2[i]);
            }
        }
        data = std::move(kept);
    }
    if (data.size() == 0) {
        std::cerr << "fit: no observations left after preprocessing\n";
        return kExitInput;
    }
    if (data.size() == 1)
        std::cerr << "fit: warning: a single observation gives a degenerate fit\n";

    csph::ModelStructure structure;
    structure.p0 = p0;
    structure.p1 = p1;
    structure.estimate_alpha = estimate_alpha;
    const csph::FitResult result = csph::fit(data, structure, std::nullopt, options);
    csph::save_fit_result(result, out);
    const csph::CSPHModel fitted = result.model.to_csph();
    std::cout << "loglik " << format_full(result.loglik) << " after "
              << result.iterations << " iterations ("
              << (result.converged ? "converged" : "iteration cap") << ")\n"
              << "tail indices " << csph::regular_variation_index(fitted, 1) << " "
              << csph::regular_variation_index(fitted, 2) << "\n"
              << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_risk(const std::string& model_file, const std::string& levels_text,
             const std::string& a_grid_text, const std::string& vartheta_text,
             int grid_points, const std::string& out, const std::string& curves) {
    const csph::CSPHModel m = load_validated(model_file);
    const std::vector<double> levels = parse_grid(levels_text);
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            std::cerr << "risk: level " << level << " outside (0,1)\n";
            return kExitInput;
        }
    }
    std::vector<double> a_grid;
    if (a_grid_text == "default")
        a_grid = csph::default_a_grid(m, grid_points);
    else
        a_grid = parse_grid(a_grid_text);
    const std::vector<double> varthetas = parse_grid(vartheta_text);

    const csph::RiskReport report = csph::build_risk_report(m, levels, a_grid, varthetas);
    csph::save_risk_report(report, out);
    std::cout << "wrote " << out << "\n";

    if (!curves.empty() && !a_grid.empty()) {
        auto col = [&](auto getter) {
            std::vector<double> y;
            y.reserve(a_grid.size());
            for (std::size_t i = 0; i < a_grid.size(); ++i) y.push_back(getter(i));
            return y;
        };
        csph::write_curve_csv(curves + "_cvar_cs_x1.csv", "a", "cvar_cs",
                              report.a_grid,
                              col([&](std::size_t i) { return report.cvar_cs[i].first; }));
        csph::write_curve_csv(curves + "_cvar_cs_x2.csv", "a", "cvar_cs",
                              report.a_grid,
                              col([&](std::size_t i) { return report.cvar_cs[i].second; }));
        csph::write_curve_csv(curves + "_mtce_cs.csv", "a", "mtce_cs", report.a_grid,
                              report.mtce_cs);
        csph::write_curve_csv(curves + "_mtcov_cs.csv", "a", "mtcov_cs", report.a_grid,
                              report.mtcov_cs);
        for (std::size_t v = 0; v < report.vartheta_grid.size(); ++v) {
            const std::string tag = std::to_string(report.vartheta_grid[v]);
            csph::write_curve_csv(curves + "_erm_x1_vartheta" + tag + ".csv", "a", "erm",
                                  report.a_grid, col([&](std::size_t i) {
                                      return report.erm[v][i].first;
                                  }));
            csph::write_curve_csv(curves + "_erm_x2_vartheta" + tag + ".csv", "a", "erm",
                                  report.a_grid, col([&](std::size_t i) {
                                      return report.erm[v][i].second;
                                  }));
        }
        std::cout << "wrote curve files with prefix " << curves << "\n";
    }
    return kExitOk;
}

int cmd_dependence(const std::string& model_file, const std::string& t_grid_text,
                   int grid_points, const std::string& out) {
    const csph::CSPHModel m = load_validated(model_file);
    std::vector<double> t_grid;
    if (t_grid_text == "default")
        t_grid = csph::default_a_grid(m, grid_points);
    else
        t_grid = parse_grid(t_grid_text);

    std::ofstream os(out);
    if (!os) {
        std::cerr << "dependence: cannot write " << out << "\n";
        return kExitInput;
    }
    os << "t,cond_mean_1,cond_mean_2,cond_var_1,cond_var_2,cond_pearson,"
          "cond_kendall,cond_spearman\n";
    for (double t : t_grid) {
        os << format_full(t) << "," << format_full(csph::cond_mean(m, 1, t)) << ","
           << format_full(csph::cond_mean(m, 2, t)) << ","
           << format_full(csph::cond_var(m, 1, t)) << ","
           << format_full(csph::cond_var(m, 2, t)) << ","
           << format_full(csph::cond_pearson(m, t)) << ","
           << format_full(csph::cond_kendall(m, t)) << ","
           << format_full(csph::cond_spearman(m, t)) << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& model_file, const std::string& points_file,
             const std::string& out) {
    const csph::CSPHModel m = load_validated(model_file);
    const auto points = csph::read_points_csv(points_file);
    std::ofstream os(out);
    if (!os) {
        std::cerr << "eval: cannot write " << out << "\n";
        return kExitInput;
    }
    os << "z1,z2,pdf,cdf\n";
    for (const auto& [z1, z2] : points) {
        os << format_full(z1) << "," << format_full(z2) << ","
           << format_full(csph::joint_pdf(m, z1, z2)) << ","
           << format_full(csph::joint_cdf(m, z1, z2)) << "\n";
    }
    std::cout << "wrote " << points.size() << " evaluations to " << out << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& model_file) {
    const csph::CSPHModel m = load_validated(model_file);
    std::cout << "model ok: " << m.num_pre() << " pre-shock and " << m.num_post()
              << " post-shock states, a1 = " << m.a1 << ", a2 = " << m.a2 << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bivariate common-shock phase-type modeling"};
    app.require_subcommand(1);

    std::string model_file, data_file, points_file, out_file, curves_prefix;
    std::size_t n_records = 0;
    std::uint64_t seed = 1;
    bool latent = false;
    int p0 = 3, p1 = 2;
    bool log_transform = false, estimate_alpha = false;
    double lower = 0.0;
    csph::FitOptions fit_options;
    std::string levels_text = "0.95,0.975,0.99";
    std::string a_grid_text = "default";
    std::string vartheta_text = "0.25,0.5,1";
    std::string t_grid_text = "default";
    int grid_points = 50;

    auto* sim = app.add_subcommand("simulate", "Draw an iid dataset from a model");
    sim->add_option("--model", model_file, "model JSON file")->required();
    sim->add_option("--n", n_records, "number of records")->required()
        ->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--out", out_file, "output CSV path")->required();
    sim->add_flag("--latent", latent, "include tau12,k,resid1,resid2 columns");

    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit to x1,x2 CSV data");
    fit_cmd->add_option("--data", data_file, "input CSV with columns x1,x2")->required();
    fit_cmd->add_option("--p0", p0, "pre-shock state count")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--p1", p1, "post-shock state count")->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--log-transform", log_transform, "fit the log of the data");
    auto* lower_opt = fit_cmd->add_option(
        "--lower", lower, "keep only rows with both coordinates above this bound");
    fit_cmd->add_flag("--estimate-alpha", estimate_alpha,
                      "estimate the initial distribution instead of pinning it");
    fit_cmd->add_option("--seed", fit_options.seed, "seed for the random starts");
    fit_cmd->add_option("--starts", fit_options.n_starts, "number of starts")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-iter", fit_options.max_iter, "iteration cap per start")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--threads", fit_options.threads,
                        "likelihood threads (0 = hardware)");
    fit_cmd->add_option("--out", out_file, "output JSON path")->required();

    auto* risk = app.add_subcommand("risk", "Risk report and measure curves");
    risk->add_option("--model", model_file, "model JSON file")->required();
    risk->add_option("--levels", levels_text, "comma list of quantile levels");
    risk->add_option("--a-grid", a_grid_text,
                     "comma list of shock thresholds, or 'default'");
    risk->add_option("--vartheta-grid", vartheta_text,
                     "comma list of risk-aversion values");
    risk->add_option("--grid-points", grid_points, "size of the default grid");
    risk->add_option("--out", out_file, "report JSON path")->required();
    risk->add_option("--curves", curves_prefix, "prefix for two-column curve CSVs");

    auto* dep = app.add_subcommand("dependence", "Conditional dependence curves");
    dep->add_option("--model", model_file, "model JSON file")->required();
    dep->add_option("--t-grid", t_grid_text, "comma list of shock times, or 'default'");
    dep->add_option("--grid-points", grid_points, "size of the default grid");
    dep->add_option("--out", out_file, "output CSV path")->required();

    auto* ev = app.add_subcommand("eval", "Joint pdf/cdf at given points");
    ev->add_option("--model", model_file, "model JSON file")->required();
    ev->add_option("--points", points_file, "CSV of z1,z2 points")->required();
    ev->add_option("--out", out_file, "output CSV path")->required();

    auto* val = app.add_subcommand("validate", "Check a model file");
    val->add_option("--model", model_file, "model JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(model_file, n_records, seed, out_file, latent);
        if (fit_cmd->parsed())
            return cmd_fit(data_file, p0, p1, log_transform, lower,
                           lower_opt->count() > 0, fit_options, estimate_alpha,
                           out_file);
        if (risk->parsed())
            return cmd_risk(model_file, levels_text, a_grid_text, vartheta_text,
                            grid_points, out_file, curves_prefix);
        if (dep->parsed())
            return cmd_dependence(model_file, t_grid_text, grid_points, out_file);
        if (ev->parsed()) return cmd_eval(model_file, points_file, out_file);
        if (val->parsed()) return cmd_validate(model_file);
    } catch (const csph::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const csph::DimensionError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const csph::FitError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    } catch (const csph::DomainError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    } catch (const csph::NumericError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
