#include "fimcon/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fimcon {

namespace {

void append_names(std::ostringstream& os, const std::string& base, int m) {
    if (m == 1) {
        os << "," << base;
    } else {
        for (int c = 1; c <= m; ++c) os << "," << base << "_" << c;
    }
}

}  // namespace

std::string trace_csv_header(int m, int r) {
    std::ostringstream os;
    os << "t";
    append_names(os, "y", m);
    append_names(os, "y_ref", m);
    for (int i = 1; i <= r; ++i) {
        append_names(os, "e" + std::to_string(i), m);
        os << ",psi" << i;
    }
    os << ",k";
    append_names(os, "w", m);
    append_names(os, "u", m);
    return os.str();
}

void write_trace_csv(const std::string& path, const SimulationTrace& trace, int precision) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open CSV output file: " + path);
    out << trace_csv_header(trace.m, trace.r) << "\n";

    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.*g", precision, v);
        out << buf;
    };
    for (int k = 0; k < trace.records(); ++k) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, trace.t[static_cast<std::size_t>(k)]);
        out << buf;
        for (int c = 0; c < trace.m; ++c) put(trace.y(c, k));
        for (int c = 0; c < trace.m; ++c) put(trace.y_ref(c, k));
        for (int i = 0; i < trace.r; ++i) {
            for (int c = 0; c < trace.m; ++c) put(trace.e(i * trace.m + c, k));
            put(trace.psi(i, k));
        }
        put(trace.gain(k));
        for (int c = 0; c < trace.m; ++c) put(trace.w(c, k));
        for (int c = 0; c < trace.m; ++c) put(trace.u(c, k));
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed writing CSV output file: " + path);
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) return data[c];
    throw std::out_of_range("no such CSV column: " + name);
}

CsvTable read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) table.columns.push_back(field);
    table.data.resize(table.columns.size());

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::size_t c = 0;
        while (std::getline(row, field, ',')) {
            if (c >= table.columns.size()) throw std::runtime_error("CSV row wider than header");
            table.data[c++].push_back(std::stod(field));
        }
        if (c != table.columns.size()) throw std::runtime_error("CSV row narrower than header");
    }
    return table;
}

}  // namespace fimcon
