#include "csph/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "csph/errors.hpp"

namespace csph {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ValidationError(std::string("model file: ") + name +
                              " must be an array of row arrays");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw ValidationError(std::string("model file: ragged rows in ") + name);
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

RowVector rowvec_from_json(const json& j, const char* name) {
    if (!j.is_array())
        throw ValidationError(std::string("model file: ") + name + " must be an array");
    RowVector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

json reduced_to_json(const ReducedModel& m) {
    json j;
    j["alpha"] = json::array();
    for (Eigen::Index i = 0; i < m.alpha.size(); ++i) j["alpha"].push_back(m.alpha(i));
    j["T"] = matrix_to_json(m.T);
    j["U"] = matrix_to_json(m.U);
    j["Q1"] = matrix_to_json(m.Q1);
    j["Q2"] = matrix_to_json(m.Q2);
    j["beta"] = m.beta;
    return j;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

CSPHModel model_from_json(const json& j) {
    for (const char* key : {"alpha", "T", "U", "Q1", "Q2"})
        if (!j.contains(key))
            throw ValidationError(std::string("model file: missing key ") + key);

    if (j.contains("beta")) {
        if (j.contains("a1") || j.contains("a2"))
            throw ValidationError("model file: beta and a1/a2 are mutually exclusive");
        ReducedModel r;
        r.alpha = rowvec_from_json(j["alpha"], "alpha");
        r.T = matrix_from_json(j["T"], "T");
        r.U = matrix_from_json(j["U"], "U");
        r.Q1 = matrix_from_json(j["Q1"], "Q1");
        r.Q2 = matrix_from_json(j["Q2"], "Q2");
        r.beta = j["beta"].get<double>();
        return r.to_csph();
    }

    CSPHModel m;
    m.alpha = rowvec_from_json(j["alpha"], "alpha");
    m.T = matrix_from_json(j["T"], "T");
    m.U = matrix_from_json(j["U"], "U");
    m.Q1 = matrix_from_json(j["Q1"], "Q1");
    m.Q2 = matrix_from_json(j["Q2"], "Q2");
    m.a1 = j.value("a1", 1.0);
    m.a2 = j.value("a2", 1.0);
    return m;
}

}  // namespace

CSPHModel model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("cannot parse model JSON: ") + e.what());
    }
    return model_from_json(j);
}

std::string model_to_json_text(const CSPHModel& m) {
    json j;
    j["alpha"] = json::array();
    for (Eigen::Index i = 0; i < m.alpha.size(); ++i) j["alpha"].push_back(m.alpha(i));
    j["T"] = matrix_to_json(m.T);
    j["U"] = matrix_to_json(m.U);
    j["Q1"] = matrix_to_json(m.Q1);
    j["Q2"] = matrix_to_json(m.Q2);
    j["a1"] = m.a1;
    j["a2"] = m.a2;
    return j.dump(2);
}

std::string model_to_json_text(const ReducedModel& m) { return reduced_to_json(m).dump(2); }

CSPHModel load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

void save_model(const CSPHModel& m, const std::string& path) {
    write_text_file(path, model_to_json_text(m));
}

void save_model(const ReducedModel& m, const std::string& path) {
    write_text_file(path, model_to_json_text(m));
}

void write_dataset_csv(std::ostream& os, const std::vector<SampleRecord>& records,
                       bool include_latent) {
    os << (include_latent ? "x1,x2,tau12,k,resid1,resid2" : "x1,x2") << "\n";
    for (const auto& r : records) {
        os << format_full(r.x1) << "," << format_full(r.x2);
        if (include_latent) {
            os << "," << format_full(r.tau12) << "," << r.k << ","
               << format_full(r.resid1) << "," << format_full(r.resid2);
        }
        os << "\n";
    }
}

void write_dataset_csv(const std::string& path,
                       const std::vector<SampleRecord>& records,
                       bool include_latent) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    write_dataset_csv(out, records, include_latent);
}

namespace {

bool parse_two_doubles(const std::string& line, double& a, double& b) {
    std::string cleaned = line;
    for (char& c : cleaned)
        if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ss(cleaned);
    return static_cast<bool>(ss >> a >> b);
}

std::vector<std::pair<double, double>> read_two_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        double a, b;
        if (!parse_two_doubles(line, a, b)) {
            if (lineno == 1) continue;  // header row
            throw ValidationError(path + ": cannot parse line " +
                                  std::to_string(lineno) + ": " + line);
        }
        rows.emplace_back(a, b);
    }
    return rows;
}

}  // namespace

BivariateDataset read_dataset_csv(const std::string& path) {
    BivariateDataset data;
    for (const auto& [a, b] : read_two_columns(path)) {
        data.x1.push_back(a);
        data.x2.push_back(b);
    }
    return data;
}

std::vector<std::pair<double, double>> read_points_csv(const std::string& path) {
    return read_two_columns(path);
}

std::string fit_result_to_json_text(const FitResult& r) {
    json j;
    j["model"] = reduced_to_json(r.model);
    j["loglik"] = r.loglik;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["gradient_norm"] = r.gradient_norm;
    json trace = json::array();
    for (const auto& [it, ll] : r.trace) trace.push_back({{"iteration", it}, {"loglik", ll}});
    j["trace"] = std::move(trace);
    const CSPHModel m = r.model.to_csph();
    j["tail_index"] = {regular_variation_index(m, 1), regular_variation_index(m, 2)};
    return j.dump(2);
}

void save_fit_result(const FitResult& r, const std::string& path) {
    write_text_file(path, fit_result_to_json_text(r));
}

std::string risk_report_to_json_text(const RiskReport& r) {
    json j;
    j["mean"] = {r.mean1, r.mean2};
    j["variance"] = {r.var1, r.var2};
    j["pearson"] = r.pearson;
    json var_table = json::array();
    for (const auto& [level, pair] : r.var_at_risk)
        var_table.push_back(
            {{"level", level}, {"x1", pair.first}, {"x2", pair.second}});
    j["value_at_risk"] = std::move(var_table);
    j["tail_index"] = {r.tail_index.first, r.tail_index.second};
    j["a_grid"] = r.a_grid;
    json cvar = json::array();
    for (const auto& [v1, v2] : r.cvar_cs) cvar.push_back({v1, v2});
    j["cvar_cs"] = std::move(cvar);
    j["mtce_cs"] = r.mtce_cs;
    j["mtcov_cs"] = r.mtcov_cs;
    j["vartheta_grid"] = r.vartheta_grid;
    json erm = json::array();
    for (const auto& curve : r.erm) {
        json pts = json::array();
        for (const auto& [m1, m2] : curve) pts.push_back({m1, m2});
        erm.push_back(std::move(pts));
    }
    j["erm"] = std::move(erm);
    return j.dump(2);
}

void save_risk_report(const RiskReport& r, const std::string& path) {
    write_text_file(path, risk_report_to_json_text(r));
}

void write_curve_csv(const std::string& path, const std::string& x_name,
                     const std::string& y_name, const std::vector<double>& x,
                     const std::vector<double>& y) {
    if (x.size() != y.size())
        throw DimensionError("write_curve_csv: grid and values differ in length");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << x_name << "," << y_name << "\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_full(x[i]) << "," << format_full(y[i]) << "\n";
}

}  // namespace csph
