#include "schoenberg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace schoenberg::io {

namespace {

using Index = Eigen::Index;

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_line(const std::string& line, const std::string& source, int lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw InputError(fmt::format("{}:{}: unterminated quoted field", source, lineno));
    out.push_back(trim(cur));
    return out;
}

std::optional<double> to_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

double number_at(const CsvRows& rows, std::size_t r, std::size_t c) {
    auto v = to_number(rows.cells[r][c]);
    if (!v || !std::isfinite(*v))
        throw InputError(fmt::format("{}:{}: column {}: '{}' is not a finite number", rows.source, rows.line[r], c + 1,
                                     rows.cells[r][c]));
    return *v;
}

bool all_numeric(const std::vector<std::string>& row, std::size_t from) {
    for (std::size_t c = from; c < row.size(); ++c)
        if (!to_number(row[c])) return false;
    return true;
}

void require_width(const CsvRows& rows, std::size_t r, std::size_t width) {
    if (rows.cells[r].size() != width)
        throw InputError(fmt::format("{}:{}: expected {} fields, found {}", rows.source, rows.line[r], width, rows.cells[r].size()));
}

}  // namespace

CsvRows read_csv(std::istream& in, std::string source) {
    CsvRows rows;
    rows.source = std::move(source);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        rows.cells.push_back(split_line(line, rows.source, lineno));
        rows.line.push_back(lineno);
    }
    return rows;
}

CsvRows read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("{}: cannot open file", path));
    return read_csv(in, path);
}

Points parse_points(const CsvRows& rows, const std::string& weights_col) {
    if (rows.cells.empty()) throw InputError(fmt::format("{}: no data", rows.source));
    std::vector<std::string> header;
    std::size_t first_data = 0;
    const auto& top = rows.cells.front();
    if (all_numeric(top, 0)) {
        for (std::size_t c = 0; c < top.size(); ++c) header.push_back(fmt::format("x{}", c + 1));
    } else {
        header = top;
        first_data = 1;
    }
    if (first_data >= rows.cells.size()) throw InputError(fmt::format("{}: header but no data rows", rows.source));

    const std::size_t width = header.size();
    for (std::size_t r = first_data; r < rows.cells.size(); ++r) require_width(rows, r, width);

    bool label_column = header.front() == "label";
    if (!label_column && first_data == 1) {
        for (std::size_t r = first_data; r < rows.cells.size() && !label_column; ++r)
            label_column = !to_number(rows.cells[r][0]);
    }
    std::optional<std::size_t> weight_index;
    std::vector<std::size_t> coord_columns;
    for (std::size_t c = label_column ? 1 : 0; c < width; ++c) {
        if (header[c] == weights_col) weight_index = c;
        else coord_columns.push_back(c);
    }
    if (coord_columns.empty()) throw InputError(fmt::format("{}: no coordinate columns", rows.source));

    const std::size_t n = rows.cells.size() - first_data;
    Configuration config;
    config.coords.resize(static_cast<Index>(n), static_cast<Index>(coord_columns.size()));
    Vector mass = Vector::Ones(static_cast<Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = k + first_data;
        for (std::size_t j = 0; j < coord_columns.size(); ++j)
            config.coords(static_cast<Index>(k), static_cast<Index>(j)) = number_at(rows, r, coord_columns[j]);
        if (weight_index) {
            mass(static_cast<Index>(k)) = number_at(rows, r, *weight_index);
            if (!(mass(static_cast<Index>(k)) > 0.0))
                throw InputError(fmt::format("{}:{}: weight must be > 0", rows.source, rows.line[r]));
        }
        config.labels.push_back(label_column ? rows.cells[r][0] : std::to_string(k + 1));
    }
    return Points{std::move(config), Weights::normalized(mass)};
}

Distances parse_distances(const CsvRows& rows) {
    if (rows.cells.empty()) throw InputError(fmt::format("{}: no data", rows.source));
    std::size_t first_data = 0;
    std::optional<std::size_t> weight_index;
    const auto& top = rows.cells.front();
    // A header has non-numeric cells beyond an optional leading label cell.
    if (!all_numeric(top, 1) || (!top.empty() && top[0].empty())) {
        first_data = 1;
        if (top.back() == "w") weight_index = top.size() - 1;
    }
    const std::size_t n = rows.cells.size() - first_data;
    if (n == 0) throw InputError(fmt::format("{}: no data rows", rows.source));
    const std::size_t width = rows.cells[first_data].size();
    const std::size_t extra = width - n - (weight_index ? 1 : 0);
    if (width < n || (extra != 0 && extra != 1))
        throw InputError(fmt::format("{}:{}: distance matrix must be square: {} rows but {} fields", rows.source,
                                     rows.line[first_data], n, width));
    const bool labels = extra == 1;

    Matrix d(static_cast<Index>(n), static_cast<Index>(n));
    Vector mass(static_cast<Index>(n));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = k + first_data;
        require_width(rows, r, width);
        for (std::size_t j = 0; j < n; ++j)
            d(static_cast<Index>(k), static_cast<Index>(j)) = number_at(rows, r, j + (labels ? 1 : 0));
        if (weight_index) mass(static_cast<Index>(k)) = number_at(rows, r, *weight_index);
        if (labels) names.push_back(rows.cells[r][0]);
        else if (first_data == 1 && !weight_index && top.size() == n) names.push_back(top[k]);
    }
    try {
        Distances out{DistanceMatrix(std::move(d), std::move(names)), std::nullopt};
        if (weight_index) out.weights = mass;
        return out;
    } catch (const std::invalid_argument& e) {
        throw InputError(fmt::format("{}: {}", rows.source, e.what()));
    }
}

ContingencyTable parse_table(const CsvRows& rows) {
    if (rows.cells.size() < 2) throw InputError(fmt::format("{}: contingency table needs a header and data rows", rows.source));
    const auto& header = rows.cells.front();
    if (header.size() < 2) throw InputError(fmt::format("{}:{}: contingency table needs at least one column", rows.source, rows.line[0]));
    std::vector<std::string> cols(header.begin() + 1, header.end());
    const std::size_t n = rows.cells.size() - 1;
    Matrix counts(static_cast<Index>(n), static_cast<Index>(cols.size()));
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t r = k + 1;
        require_width(rows, r, header.size());
        names.push_back(rows.cells[r][0]);
        for (std::size_t g = 0; g < cols.size(); ++g) {
            const double v = number_at(rows, r, g + 1);
            if (v < 0.0) throw InputError(fmt::format("{}:{}: column {}: negative count {}", rows.source, rows.line[r], g + 2, v));
            counts(static_cast<Index>(k), static_cast<Index>(g)) = v;
        }
    }
    try {
        return ContingencyTable(std::move(counts), std::move(names), std::move(cols));
    } catch (const std::invalid_argument& e) {
        throw InputError(fmt::format("{}: {}", rows.source, e.what()));
    }
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string format_pretty(double v) { return fmt::format("{:.6g}", v); }

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

}  // namespace schoenberg::io
