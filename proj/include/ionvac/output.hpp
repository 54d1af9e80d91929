#pragma once

// Byte-stable CSV/JSON emission. Numbers are written with 17 significant
// digits through std::to_chars, so the output never depends on the locale.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionvac {

using Json = nlohmann::ordered_json;

std::string format_number(double value);
std::string format_cell(const Json& cell);
std::string format_number(long long value);
inline std::string format_number(int value) { return format_number(static_cast<long long>(value)); }

/// Column-oriented table; the first line of the CSV is `# ` + the compact JSON header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    /// Cells are numbers, booleans or strings.
    void add_row(std::vector<Json> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }

    std::string render(const Json& header) const;
    /// {"columns": [...], "rows": [[...], ...]}
    Json to_json() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Json>> rows_;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a digest, hex encoded.
std::string content_digest(const std::string& bytes);

}  // namespace ionvac
