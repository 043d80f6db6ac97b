#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ramanmem {

/// Locale-independent "%.12g" rendering used by every CSV writer.
std::string format_number(double value);

/// Small in-memory CSV table.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> row);
    void add_numeric_row(const std::vector<double>& row);

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ramanmem
