#include "ionvac/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ionvac/errors.hpp"

namespace ionvac {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string format_number(long long value) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_cell(const Json& cell) {
    if (cell.is_number_float()) return format_number(cell.get<double>());
    if (cell.is_number_integer()) return format_number(cell.get<long long>());
    if (cell.is_boolean()) return cell.get<bool>() ? "1" : "0";
    if (cell.is_string()) return cell.get<std::string>();
    return cell.dump();
}

void CsvTable::add_row(std::vector<Json> cells) {
    if (cells.size() != columns_.size()) {
        throw std::logic_error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const Json& header) const {
    std::string out = "# " + header.dump() + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += format_cell(r[i]);
        }
        out += '\n';
    }
    return out;
}

Json CsvTable::to_json() const {
    Json rows = Json::array();
    for (const auto& r : rows_) rows.push_back(Json(r));
    return Json{{"columns", columns_}, {"rows", std::move(rows)}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string content_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ionvac
