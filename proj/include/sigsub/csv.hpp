#pragma once

#include <string>
#include <vector>

namespace sigsub {

// All floating-point CSV output uses 17 significant digits so that values
// round-trip exactly through text.
std::string fmt17(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);  // expects a header line

}  // namespace sigsub
