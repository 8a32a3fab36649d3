#include "gelkit/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace gelkit {

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size())
{
    if (!out_)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != columns_)
        throw std::logic_error("csv row has " + std::to_string(values.size()) + " fields, expected " +
                               std::to_string(columns_));
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
    ++rows_;
}

} // namespace gelkit
