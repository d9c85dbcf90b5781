#include "postcon/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace postcon {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

const std::set<std::string>& metric_registry() {
  static const std::set<std::string> registry{
      "type1",           "type2",           "worst_type1",    "worst_type2",
      "eps",             "fit_slope",       "fit_r_squared",  "components",
      "global_type1",    "local_type1_sum", "pooled_se",      "global_accept",
      "local_accept",    "condition_lhs",   "condition_rhs",  "condition_margin",
      "condition_satisfied", "median_error", "mean_error",    "eps_n",
      "bad_mass",        "error_ratio",     "support_hit",    "posterior_mode_j",
      "acceptance_rate", "ess",             "prior_mass",     "analytic_bound",
  };
  return registry;
}

ParamsBuilder& ParamsBuilder::add(const std::string& key, const std::string& value) {
  if (!out_.empty()) out_ += ';';
  out_ += key;
  out_ += '=';
  out_ += value;
  return *this;
}

ParamsBuilder& ParamsBuilder::add(const std::string& key, double value) {
  return add(key, format_double(value));
}

ParamsBuilder& ParamsBuilder::add(const std::string& key, std::int64_t value) {
  return add(key, std::to_string(value));
}

std::optional<std::string> params_lookup(const std::string& params,
                                         const std::string& key) {
  std::size_t pos = 0;
  while (pos < params.size()) {
    std::size_t end = params.find(';', pos);
    if (end == std::string::npos) end = params.size();
    const std::size_t eq = params.find('=', pos);
    if (eq != std::string::npos && eq < end &&
        params.compare(pos, eq - pos, key) == 0)
      return params.substr(eq + 1, end - eq - 1);
    pos = end + 1;
  }
  return std::nullopt;
}

std::string csv_to_string(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,params,metric,value,std_error\n";
  for (const ResultRow& row : rows) {
    if (metric_registry().count(row.metric) == 0)
      throw std::invalid_argument("emit_csv: unregistered metric '" + row.metric + "'");
    out += row.experiment;
    out += ',';
    out += row.params;
    out += ',';
    out += row.metric;
    out += ',';
    out += format_double(row.value);
    out += ',';
    if (row.std_error) out += format_double(*row.std_error);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot open " + path.string() + " for writing");
  stream << content;
  if (!stream) throw std::runtime_error("write failed for " + path.string());
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  write_text_file(path, csv_to_string(rows));
}

namespace {

bool is_metadata_metric(const std::string& metric) {
  return metric == "fit_slope" || metric == "fit_r_squared";
}

}  // namespace

std::string plot_data_to_string(const std::vector<ResultRow>& rows) {
  std::string out = "x,series,value\n";
  std::string tail;
  for (const ResultRow& row : rows) {
    const auto x = params_lookup(row.params, "x");
    const auto series = params_lookup(row.params, "series");
    if (is_metadata_metric(row.metric)) {
      tail += "# ";
      if (series) {
        tail += *series;
        tail += ' ';
      }
      tail += row.metric;
      tail += '=';
      tail += format_double(row.value);
      tail += '\n';
      continue;
    }
    if (!x || !series) continue;
    out += *x;
    out += ',';
    out += *series;
    out += ':';
    out += row.metric;
    out += ',';
    out += format_double(row.value);
    out += '\n';
  }
  return out + tail;
}

void emit_plot_data(const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path) {
  write_text_file(path, plot_data_to_string(rows));
}

Eigen::MatrixXd read_numeric_matrix(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    double value;
    while (fields >> value) row.push_back(value);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged rows in " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no numeric data in " + path.string());
  Eigen::MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

}  // namespace postcon
