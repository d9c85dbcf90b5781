#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace postcon {

/// 17 significant digits: enough to recover the double exactly on re-parse.
std::string format_double(double value);

/// One long-format result: a named metric with a parameter snapshot.
struct ResultRow {
  std::string experiment;
  std::string params;  // "key=value;..." with deterministic key order
  std::string metric;  // must belong to metric_registry()
  double value = 0.0;
  std::optional<double> std_error;
};

/// Fixed set of metric names an experiment may emit.
const std::set<std::string>& metric_registry();

/// Incremental "key=value;..." builder preserving insertion order.
class ParamsBuilder {
 public:
  ParamsBuilder& add(const std::string& key, const std::string& value);
  ParamsBuilder& add(const std::string& key, double value);
  ParamsBuilder& add(const std::string& key, std::int64_t value);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

/// Value of a key inside a params snapshot, if present.
std::optional<std::string> params_lookup(const std::string& params,
                                         const std::string& key);

std::string csv_to_string(const std::vector<ResultRow>& rows);

/// header + one line per row: experiment,params,metric,value,std_error.
/// UTF-8, comma-delimited, newline-terminated. Throws on unregistered
/// metrics or I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

std::string plot_data_to_string(const std::vector<ResultRow>& rows);

/// Long-format (x, series, value) file: rows whose params carry "x" and
/// "series" keys become data lines; fitted-slope metrics are appended as
/// '#'-prefixed metadata comments. Ordering follows the input.
void emit_plot_data(const std::vector<ResultRow>& rows,
                    const std::filesystem::path& path);

/// Whitespace- or comma-delimited numeric text, one row per line; blank
/// lines and '#' comments are skipped. All rows must have equal length.
Eigen::MatrixXd read_numeric_matrix(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace postcon
