#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "modhate/error.hpp"
#include "modhate/matrix.hpp"
#include "modhate/text_io.hpp"

namespace modhate {

/// Feature CSV: `id` followed by named columns, one row per sample, numbers
/// in shortest round-trip decimal form.
struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  Matrix values;

  void add(const std::string& id, std::span<const double> row) {
    if (row.size() != columns.size()) {
      throw Error(ErrorCode::DimensionMismatch, "feature row for '" + id + "' has " +
                                                    std::to_string(row.size()) + " values, expected " +
                                                    std::to_string(columns.size()));
    }
    if (values.rows() == 0) values = Matrix(0, columns.size());
    ids.push_back(id);
    values.append_row(row);
  }

  std::size_t rows() const { return ids.size(); }

  std::unordered_map<std::string, std::size_t> index() const {
    std::unordered_map<std::string, std::size_t> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], i);
    return out;
  }

  std::string to_csv() const {
    std::string out = "id";
    for (const auto& c : columns) out += ',' + c;
    out += '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out += ids[i];
      for (double v : values.row(i)) {
        out += ',';
        out += text_io::format_double(v);
      }
      out += '\n';
    }
    return out;
  }

  static FeatureTable from_csv(std::string_view text) {
    FeatureTable t;
    bool header = true;
    std::vector<double> row;
    for (const auto& line : text_io::lines(text)) {
      if (line.empty()) continue;
      const auto fields = text_io::split(line);
      if (header) {
        if (fields.empty() || fields[0] != "id") {
          throw Error(ErrorCode::BadFeatureFile, "feature CSV must start with an id column");
        }
        for (std::size_t j = 1; j < fields.size(); ++j) t.columns.emplace_back(fields[j]);
        t.values = Matrix(0, t.columns.size());
        header = false;
        continue;
      }
      if (fields.size() != t.columns.size() + 1) {
        throw Error(ErrorCode::BadFeatureFile, "row '" + std::string(fields[0]) + "' has " +
                                                   std::to_string(fields.size() - 1) + " values");
      }
      row.resize(t.columns.size());
      for (std::size_t j = 1; j < fields.size(); ++j) {
        const auto v = text_io::parse_double(fields[j]);
        if (!v) throw Error(ErrorCode::BadFeatureFile, "non-numeric value in row " + std::string(fields[0]));
        row[j - 1] = *v;
      }
      t.ids.emplace_back(fields[0]);
      t.values.append_row(row);
    }
    if (header) throw Error(ErrorCode::BadFeatureFile, "feature CSV is empty");
    return t;
  }

  void save(const std::filesystem::path& path) const { text_io::write_file(path, to_csv()); }
  static FeatureTable load(const std::filesystem::path& path) {
    return from_csv(text_io::read_file(path));
  }
};

}  // namespace modhate
