#pragma once

#include <string>
#include <vector>

#include "fimcon/simulation.hpp"

namespace fimcon {

/// Column layout (m = 1): t,y,y_ref,e1,psi1,...,e{r},psi{r},k,w,u.
/// Multi-channel signals expand to suffixed columns (y_1..y_m etc.).
std::string trace_csv_header(int m, int r);

/// Writes the trace with the given number of significant digits (17 is
/// lossless for doubles). The emitted bytes are deterministic.
void write_trace_csv(const std::string& path, const SimulationTrace& trace, int precision = 17);

/// Parsed CSV: header names plus one column of doubles per name.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[c][row]

    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
};

CsvTable read_trace_csv(const std::string& path);

}  // namespace fimcon
