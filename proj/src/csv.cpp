#include "ramanmem/csv.hpp"

#include "ramanmem/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ramanmem {

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw DomainError("csv: row has " + std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header_.size()));
    }
    rows_.push_back(std::move(row));
}

void CsvTable::add_numeric_row(const std::vector<double>& row) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (double v : row) {
        fields.push_back(format_number(v));
    }
    add_row(std::move(fields));
}

std::string CsvTable::str() const {
    std::ostringstream os;
    auto emit = [&os](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                os << ',';
            }
            os << fields[i];
        }
        os << '\n';
    };
    emit(header_);
    for (const auto& r : rows_) {
        emit(r);
    }
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

} // namespace ramanmem
