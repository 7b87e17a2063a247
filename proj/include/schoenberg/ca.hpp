#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schoenberg/geometry.hpp"

namespace schoenberg {

/// Nonnegative n x m counts with row and column labels. Every row and
/// column total must be positive. Counts may be non-integer.
class ContingencyTable {
public:
    explicit ContingencyTable(Matrix counts, std::vector<std::string> row_labels = {},
                              std::vector<std::string> col_labels = {});

    const Matrix& counts() const { return n_; }
    std::size_t rows() const { return static_cast<std::size_t>(n_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(n_.cols()); }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    Vector row_totals() const { return n_.rowwise().sum(); }
    Vector col_totals() const { return n_.colwise().sum().transpose(); }
    double total() const { return n_.sum(); }

private:
    Matrix n_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

/// f_i = n_i. / n..
Weights row_weights(const ContingencyTable& table);

/// D_ij = sum_g rho_g (q_ig - q_jg)^2 with q_ig = n_ig n.. / (n_i. n.g) and
/// rho_g = n.g / n.. .
DistanceMatrix chi_square_distances(const ContingencyTable& table);

/// Inertia of the row cloud under chi-square geometry; equals Pearson's
/// chi-square statistic divided by the grand total.
double ca_inertia(const ContingencyTable& table);

/// Weighted classical scaling of the chi-square distances with row weights.
/// Requires 1 <= dim <= min(n, m) - 1.
Configuration factorial_coordinates(const ContingencyTable& table, std::size_t dim);

/// Per-dimension centroid coordinates sum_i alpha_i x_ib for the first
/// `dims` columns of `config` (all columns when dims is 0).
Vector project_trajectory(const Vector& alpha, const Configuration& config, std::size_t dims = 0);

/// Synthetic stand-in for a country-by-discipline publication table: one
/// heavy row whose profile follows the column margins closely, plus
/// lighter rows with individually perturbed profiles. Row `dominant` carries
/// `dominance` times the mass of a typical row. Clearly synthetic; the
/// labels are "row_01".. and "col_01"..
ContingencyTable synthetic_dominant_table(std::size_t rows = 29, std::size_t cols = 22, std::size_t dominant = 0,
                                          double dominance = 20.0, std::uint64_t seed = 7);

}  // namespace schoenberg
