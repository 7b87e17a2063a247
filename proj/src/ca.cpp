#include "schoenberg/ca.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace schoenberg {

namespace {

using Index = Eigen::Index;

std::vector<std::string> numbered(std::string_view prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("{}{:02}", prefix, i + 1));
    return out;
}

// q_ig = n_ig n.. / (n_i. n.g), the row profile relative to the column margin.
Matrix relative_profiles(const ContingencyTable& t) {
    const Vector r = t.row_totals();
    const Vector c = t.col_totals();
    Matrix q = t.counts() * t.total();
    q.array().colwise() /= r.array();
    q.array().rowwise() /= c.transpose().array();
    return q;
}

}  // namespace

ContingencyTable::ContingencyTable(Matrix counts, std::vector<std::string> row_labels, std::vector<std::string> col_labels)
    : n_(std::move(counts)), row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)) {
    if (n_.rows() == 0 || n_.cols() == 0) throw std::invalid_argument("contingency table must not be empty");
    if (row_labels_.empty()) row_labels_ = numbered("row_", rows());
    if (col_labels_.empty()) col_labels_ = numbered("col_", cols());
    if (row_labels_.size() != rows() || col_labels_.size() != cols())
        throw std::invalid_argument("contingency table labels do not match its shape");
    for (Index i = 0; i < n_.rows(); ++i)
        for (Index g = 0; g < n_.cols(); ++g)
            if (!std::isfinite(n_(i, g)) || n_(i, g) < 0.0)
                throw std::invalid_argument(fmt::format("count ({},{}) must be finite and >= 0, got {}", i + 1, g + 1, n_(i, g)));
    const Vector r = row_totals();
    const Vector c = col_totals();
    for (Index i = 0; i < r.size(); ++i)
        if (!(r(i) > 0.0)) throw std::invalid_argument(fmt::format("row '{}' has a zero total", row_labels_[static_cast<std::size_t>(i)]));
    for (Index g = 0; g < c.size(); ++g)
        if (!(c(g) > 0.0)) throw std::invalid_argument(fmt::format("column '{}' has a zero total", col_labels_[static_cast<std::size_t>(g)]));
}

Weights row_weights(const ContingencyTable& table) { return Weights::normalized(table.row_totals()); }

DistanceMatrix chi_square_distances(const ContingencyTable& table) {
    const Matrix q = relative_profiles(table);
    const Vector rho = table.col_totals() / table.total();
    const Index n = q.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (rho.array() * (q.row(i) - q.row(j)).transpose().array().square()).sum();
    return DistanceMatrix(std::move(d), table.row_labels());
}

double ca_inertia(const ContingencyTable& table) { return inertia(chi_square_distances(table), row_weights(table)); }

Configuration factorial_coordinates(const ContingencyTable& table, std::size_t dim) {
    const std::size_t limit = std::min(table.rows(), table.cols());
    if (dim < 1 || dim + 1 > limit)
        throw std::invalid_argument(fmt::format("factorial dimension must be in [1, {}], got {}", limit - 1, dim));
    return classical_mds(chi_square_distances(table), row_weights(table), dim);
}

Vector project_trajectory(const Vector& alpha, const Configuration& config, std::size_t dims) {
    if (static_cast<std::size_t>(alpha.size()) != config.size())
        throw std::invalid_argument(fmt::format("profile has {} entries but configuration {} rows", alpha.size(), config.size()));
    if (dims == 0) dims = config.dim();
    if (dims > config.dim()) throw std::invalid_argument("projection asks for more dimensions than the configuration has");
    return config.coords.leftCols(static_cast<Index>(dims)).transpose() * alpha;
}

ContingencyTable synthetic_dominant_table(std::size_t rows, std::size_t cols, std::size_t dominant, double dominance,
                                          std::uint64_t seed) {
    if (rows < 2 || cols < 2) throw std::invalid_argument("synthetic table needs at least 2 rows and 2 columns");
    if (dominant >= rows) throw std::invalid_argument("dominant row out of range");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> shape(2.0, 1.0);
    std::uniform_real_distribution<double> mass(50.0, 150.0);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::normal_distribution<double> tilt(0.0, 0.6);

    Vector base(static_cast<Index>(cols));
    for (Index g = 0; g < base.size(); ++g) base(g) = shape(rng);
    base /= base.sum();

    Matrix n(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < n.rows(); ++i) {
        if (static_cast<std::size_t>(i) == dominant) {
            for (Index g = 0; g < n.cols(); ++g) n(i, g) = std::round(dominance * 100.0 * base(g) * (1.0 + jitter(rng)));
        } else {
            Vector profile(base.size());
            for (Index g = 0; g < profile.size(); ++g) profile(g) = base(g) * std::exp(tilt(rng));
            profile /= profile.sum();
            const double m = mass(rng);
            for (Index g = 0; g < n.cols(); ++g) n(i, g) = std::round(m * profile(g));
        }
    }
    for (Index g = 0; g < n.cols(); ++g)
        if (n.col(g).sum() == 0.0) n(static_cast<Index>(dominant), g) = 1.0;
    for (Index i = 0; i < n.rows(); ++i)
        if (n.row(i).sum() == 0.0) n(i, 0) = 1.0;
    return ContingencyTable(std::move(n), numbered("row_", rows), numbered("col_", cols));
}

}  // namespace schoenberg
