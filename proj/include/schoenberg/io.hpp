#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "schoenberg/ca.hpp"
#include "schoenberg/geometry.hpp"

namespace schoenberg::io {

/// Malformed input; the message carries the source name and line number.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rows of a comma-separated file. Blank lines and lines starting with '#'
/// are skipped; `line` keeps the 1-based source line of each row.
struct CsvRows {
    std::string source;
    std::vector<std::vector<std::string>> cells;
    std::vector<int> line;
};

CsvRows read_csv(std::istream& in, std::string source);
CsvRows read_csv_file(const std::string& path);

/// Points file: header row naming the columns, numeric coordinates, an
/// optional weight column (`weights_col`, default "w") and an optional
/// non-numeric first column of labels. Weights are normalized; without a
/// weight column they are uniform.
struct Points {
    Configuration config;
    Weights weights;
};
Points parse_points(const CsvRows& rows, const std::string& weights_col = "w");

/// Square distance file, with an optional header row and an optional first
/// label column. A header column named `w` (last) carries weights.
struct Distances {
    DistanceMatrix distances;
    std::optional<Vector> weights;
};
Distances parse_distances(const CsvRows& rows);

/// Contingency file: header row of column labels, first column row labels,
/// nonnegative numeric cells.
ContingencyTable parse_table(const CsvRows& rows);

/// Full-precision decimal (17 significant digits).
std::string format_double(double v);
/// Six significant digits, for --pretty.
std::string format_pretty(double v);

std::string sha256_hex(std::string_view bytes);

}  // namespace schoenberg::io
