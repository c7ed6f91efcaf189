#include "gascollide/cli/csv.hpp"

#include <cmath>
#include <cstdio>

#include "gascollide/errors.hpp"

namespace gascollide::cli {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size())
{
    if (!out_) {
        throw IoError("cannot open " + path + " for writing");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

std::string CsvWriter::format(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_) {
        throw InvalidArgument("csv: row width does not match the header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) {
            out_ << ',';
        }
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>) {
                    out_ << format(v);
                } else {
                    out_ << v;
                }
            },
            cells[i]);
    }
    out_ << '\n';
}

void CsvWriter::close()
{
    out_.flush();
    if (!out_) {
        throw IoError("write to " + path_ + " failed");
    }
    out_.close();
}

}  // namespace gascollide::cli
