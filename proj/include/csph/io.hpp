#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "csph/fit.hpp"
#include "csph/risk.hpp"
#include "csph/simulate.hpp"

namespace csph {

/// Model file schema: alpha (array), T, U, Q1, Q2 (arrays of row arrays), and
/// either a1/a2 (two-scale form) or beta (reduced form). Numbers keep full
/// precision on round trips.
CSPHModel load_model(const std::string& path);
void save_model(const CSPHModel& m, const std::string& path);
void save_model(const ReducedModel& m, const std::string& path);

CSPHModel model_from_json_text(const std::string& text);
std::string model_to_json_text(const CSPHModel& m);
std::string model_to_json_text(const ReducedModel& m);

/// Dataset CSV: header `x1,x2[,tau12,k,resid1,resid2]`, one record per line,
/// 17 significant digits.
void write_dataset_csv(std::ostream& os, const std::vector<SampleRecord>& records,
                       bool include_latent);
void write_dataset_csv(const std::string& path,
                       const std::vector<SampleRecord>& records,
                       bool include_latent);

/// Reads the first two numeric columns; the header row is optional and
/// detected. Throws ValidationError naming the first unparsable line.
BivariateDataset read_dataset_csv(const std::string& path);

/// Point list (z1,z2 per line, optional header) for density/cdf evaluation.
std::vector<std::pair<double, double>> read_points_csv(const std::string& path);

std::string fit_result_to_json_text(const FitResult& r);
void save_fit_result(const FitResult& r, const std::string& path);

std::string risk_report_to_json_text(const RiskReport& r);
void save_risk_report(const RiskReport& r, const std::string& path);

/// Two-column curve file (grid value, measure value).
void write_curve_csv(const std::string& path, const std::string& x_name,
                     const std::string& y_name, const std::vector<double>& x,
                     const std::vector<double>& y);

}  // namespace csph
