#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gelkit {

/// Shortest form that round-trips (never more than 17 significant digits), '.'
/// decimal regardless of locale; "nan" and "inf" for non-finite values.
std::string format_number(double x);

/// Comma-separated writer with a header row. Throws std::runtime_error if the
/// file cannot be opened.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    std::size_t rows() const { return rows_; }

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t rows_ = 0;
};

} // namespace gelkit
