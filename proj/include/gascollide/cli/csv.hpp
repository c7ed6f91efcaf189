#pragma once

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace gascollide::cli {

/*!
 * CSV output with a mandatory header, '.' decimals, LF line ends and
 * 17 significant digits for reals (NaN written as `nan`).
 */
class CsvWriter
{
  public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<Cell>& cells);
    // Flushes and reports write errors as IoError.
    void close();

    static std::string format(double v);

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

}  // namespace gascollide::cli
