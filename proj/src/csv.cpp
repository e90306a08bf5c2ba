#include "factorcount/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace fc {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out) {
    const std::string s = trimmed(raw);
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

PanelData ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw input_error("ingest_csv: cannot open " + path.string());

    std::vector<std::vector<std::string>> cells;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trimmed(line).empty() && in.peek() == EOF) break;  // trailing newline
        cells.push_back(split_line(line));
    }
    if (cells.empty()) throw input_error("ingest_csv: empty file " + path.string());

    const std::size_t width = cells.front().size();
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].size() != width)
            throw input_error("ingest_csv: ragged row " + std::to_string(i + 1) +
                              " (expected " + std::to_string(width) + " cells, got " +
                              std::to_string(cells[i].size()) + ")");

    // Header row: present when any cell beyond the first is non-numeric.
    double tmp;
    bool header_row = false;
    for (std::size_t j = 1; j < width; ++j)
        if (!parse_double(cells[0][j], tmp)) header_row = true;
    const std::size_t row0 = header_row ? 1 : 0;

    // Label column: present when any body cell in column 0 is non-numeric.
    bool label_col = false;
    for (std::size_t i = row0; i < cells.size(); ++i)
        if (!parse_double(cells[i][0], tmp)) label_col = true;
    const std::size_t col0 = label_col ? 1 : 0;

    const std::size_t n = cells.size() - row0;
    const std::size_t t = width - col0;
    if (n < 2 || t < 2)
        throw dimension_error("ingest_csv: need at least a 2x2 numeric body, got " +
                              std::to_string(n) + "x" + std::to_string(t));

    Matrix values(n, t);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
            double v;
            if (!parse_double(cells[row0 + i][col0 + j], v))
                throw input_error("ingest_csv: bad cell at row " +
                                  std::to_string(row0 + i + 1) + ", column " +
                                  std::to_string(col0 + j + 1) + " ('" +
                                  cells[row0 + i][col0 + j] + "')");
            values(i, j) = v;
        }
    }

    std::optional<std::vector<std::string>> series, times;
    if (label_col) {
        std::vector<std::string> s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(trimmed(cells[row0 + i][0]));
        series = std::move(s);
    }
    if (header_row) {
        std::vector<std::string> ts;
        for (std::size_t j = 0; j < t; ++j) ts.push_back(trimmed(cells[0][col0 + j]));
        times = std::move(ts);
    }
    return PanelData(std::move(values), std::move(series), std::move(times));
}

void write_csv(const PanelData& panel, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw input_error("write_csv: cannot open " + path.string());
    out.precision(17);

    const bool has_series = panel.series_labels.has_value();
    if (panel.time_labels) {
        if (has_series) out << "series";
        for (std::size_t j = 0; j < panel.time_labels->size(); ++j) {
            if (has_series || j > 0) out << ',';
            out << (*panel.time_labels)[j];
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < panel.n(); ++i) {
        if (has_series) out << (*panel.series_labels)[i];
        for (Eigen::Index j = 0; j < panel.t(); ++j) {
            if (has_series || j > 0) out << ',';
            out << panel.values(i, j);
        }
        out << '\n';
    }
}

}  // namespace fc
