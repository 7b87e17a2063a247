#pragma once

// Random generators and independent oracles shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "schoenberg/ca.hpp"
#include "schoenberg/geometry.hpp"
#include "schoenberg/transforms.hpp"

namespace support {

using schoenberg::Configuration;
using schoenberg::ContingencyTable;
using schoenberg::Matrix;
using schoenberg::Profile;
using schoenberg::Vector;
using schoenberg::Weights;
using Rng = std::mt19937_64;

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Configuration random_configuration(Rng& rng, std::size_t n, std::size_t p, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Configuration c;
    c.coords.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < c.coords.rows(); ++i)
        for (Eigen::Index j = 0; j < c.coords.cols(); ++j) c.coords(i, j) = g(rng);
    for (std::size_t i = 0; i < n; ++i) c.labels.push_back(std::to_string(i + 1));
    return c;
}

inline Vector random_positive(Rng& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
    return v;
}

inline Weights random_weights(Rng& rng, std::size_t n) { return Weights::normalized(random_positive(rng, n)); }
inline Profile random_profile(Rng& rng, std::size_t n) { return Profile::normalized(random_positive(rng, n)); }

/// Integer counts in [0, 20] with every margin positive.
inline ContingencyTable random_table(Rng& rng, std::size_t rows, std::size_t cols) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::uniform_int_distribution<int> u(0, 20);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index g = 0; g < m.cols(); ++g) m(i, g) = u(rng);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.row(i).sum() == 0) m(i, i % m.cols()) = 1;
    for (Eigen::Index g = 0; g < m.cols(); ++g)
        if (m.col(g).sum() == 0) m(g % m.rows(), g) = 1;
    return ContingencyTable(m);
}

/// Pearson chi-square from expected counts r_i c_g / n.
inline double pearson_chi2(const Matrix& counts) {
    const double n = counts.sum();
    const Vector r = counts.rowwise().sum();
    const Vector c = counts.colwise().sum().transpose();
    double s = 0.0;
    for (Eigen::Index i = 0; i < counts.rows(); ++i)
        for (Eigen::Index g = 0; g < counts.cols(); ++g) {
            const double e = r(i) * c(g) / n;
            s += (counts(i, g) - e) * (counts(i, g) - e) / e;
        }
    return s;
}

/// Squared distances computed straight from coordinates.
inline double coord_sq_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) { return (a - b).squaredNorm(); }

/// Central first difference.
inline double fd1(const std::function<double(double)>& f, double x, double h) { return (f(x + h) - f(x - h)) / (2 * h); }

/// Central second difference.
inline double fd2(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

inline std::vector<schoenberg::Transform> all_families() {
    using schoenberg::Transform;
    return {Transform::identity(),        Transform::power(0.7),       Transform::power(0.3),
            Transform::exponential(2.0),  Transform::logarithmic(0.5), Transform::tukey(1.5),
            Transform::huber(0.8),        Transform::discrete(),
            Transform::mixture({{0.3, 0.5}, {0.7, 4.0}})};
}

}  // namespace support
