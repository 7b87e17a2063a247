#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace schoenberg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Strictly positive observation weights summing to one.
class Weights {
public:
    /// Throws std::invalid_argument unless every entry is > 0 and the sum is
    /// 1 within 1e-12.
    explicit Weights(Vector f);

    static Weights uniform(std::size_t n);
    /// Rescales positive raw masses (counts, frequencies) to sum to one.
    static Weights normalized(const Vector& raw);

    const Vector& values() const { return f_; }
    std::size_t size() const { return static_cast<std::size_t>(f_.size()); }
    double operator[](std::size_t i) const { return f_(static_cast<Eigen::Index>(i)); }

private:
    Vector f_;
};

/// A probability vector over observations, identifying the centroid
/// a = sum_i alpha_i x_i.
class Profile {
public:
    /// Throws std::invalid_argument on negative entries or a sum off by more
    /// than 1e-12.
    explicit Profile(Vector alpha);

    static Profile vertex(std::size_t n, std::size_t i);
    static Profile from_weights(const Weights& w) { return Profile(w.values()); }
    /// Renormalizes a nonnegative vector with positive sum.
    static Profile normalized(const Vector& raw);

    const Vector& values() const { return alpha_; }
    std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }
    double operator[](std::size_t i) const { return alpha_(static_cast<Eigen::Index>(i)); }

private:
    Vector alpha_;
};

/// Symmetric n x n matrix of squared Euclidean distances with a zero
/// diagonal, plus observation labels.
class DistanceMatrix {
public:
    /// Validates shape, finiteness, nonnegativity, zero diagonal and symmetry
    /// (within 1e-12 relative; the stored matrix is exactly symmetric).
    /// Missing labels default to "1".."n".
    explicit DistanceMatrix(Matrix d, std::vector<std::string> labels = {});

    const Matrix& values() const { return d_; }
    std::size_t size() const { return static_cast<std::size_t>(d_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return d_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Mean of the off-diagonal entries; 0 for n = 1.
    double mean_off_diagonal() const;
    /// True when some off-diagonal entry is exactly zero.
    bool has_ties() const;

private:
    Matrix d_;
    std::vector<std::string> labels_;
};

/// Point coordinates, one row per observation. When produced by MDS,
/// `eigenvalues` holds the retained principal inertias (decreasing) and
/// `total_inertia` their full sum over all dimensions.
struct Configuration {
    Matrix coords;
    std::vector<std::string> labels;
    Vector eigenvalues;
    double total_inertia = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(coords.cols()); }
    /// eigenvalue_b / total_inertia per retained dimension (zeros when the
    /// total vanishes).
    Vector explained_inertia() const;
};

DistanceMatrix sq_euclidean(const Configuration& config);

/// Delta(w) = 1/2 sum_ij w_i w_j D_ij.
double inertia(const DistanceMatrix& d, const Weights& w);
double inertia(const DistanceMatrix& d, const Profile& alpha);

/// Squared distances D_ia from every observation to the centroid of
/// `alpha`, computed from distances only. Round-off negatives down to
/// -1e-12 * max(1, max D) are clamped to zero; anything more negative means
/// D is not Euclidean and throws std::domain_error.
Vector centroid_sq_distances(const DistanceMatrix& d, const Profile& alpha);

/// Squared distance between the centroids of two profiles,
/// -1/2 z' D z with z = beta - alpha.
double centroid_separation(const DistanceMatrix& d, const Profile& alpha, const Profile& beta);

struct HuygensReport {
    double weak_deviation = 0.0;    // |1/2 sum w_i w_j D_ij - sum w_i |x_i - xbar|^2|
    double strong_deviation = 0.0;  // max_i |sum_j w_j D_ij - |x_i - xbar|^2 - Delta|
    double centroid_deviation = 0.0;  // max_i |D_iw from distances - from coordinates|
    bool passed(double tol) const {
        return weak_deviation <= tol && strong_deviation <= tol && centroid_deviation <= tol;
    }
};

/// Compares the coordinate-free and coordinate-based forms of the weak and
/// strong Huygens identities.
HuygensReport verify_huygens(const Configuration& config, const Weights& w);

/// Cosine of the angle at a between x_i - a and b - a, from squared
/// distances. Throws std::domain_error when D_ab or D_ia is zero, or when
/// the value leaves [-1, 1] by more than 1e-9.
double cos_angle(double d_ab, double d_ia, double d_ib);

/// Weighted double centering: B_ij = -1/2 (D_ij - D_iw - D_jw), the Gram
/// matrix of the configuration centered at its weighted mean.
Matrix double_center(const DistanceMatrix& d, const Weights& w);

struct EuclideanCertificate {
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool passed = true;
};

/// Eigenvalues of diag(sqrt w) B diag(sqrt w); passes when the smallest is
/// >= -rel_tol * the largest.
EuclideanCertificate certify_euclidean(const DistanceMatrix& d, const Weights& w, double rel_tol = 1e-8);

/// Number of eigenvalues above 1e-10 of the largest.
std::size_t euclidean_rank(const DistanceMatrix& d, const Weights& w);

/// Weighted classical scaling. Coordinates are w-centered and
/// w-uncorrelated, dimensions ordered by decreasing inertia, each column
/// signed so its largest-magnitude entry is positive. Requires
/// 1 <= dim <= n - 1; throws std::domain_error on a non-Euclidean input.
Configuration classical_mds(const DistanceMatrix& d, const Weights& w, std::size_t dim);

/// Result of merging coincident observations.
struct TieAggregation {
    DistanceMatrix distances;
    Weights weights;
    std::vector<std::size_t> group_of;              // original index -> merged index
    std::vector<std::vector<std::size_t>> members;  // merged index -> original indices
    Configuration configuration;                    // only filled by the coordinate overload
    bool changed() const { return members.size() != group_of.size(); }
};

/// Merges observations with D_ij <= eps_tie * mean off-diagonal D,
/// transitively. Merged weights are summed, labels joined with '|', and the
/// first member of each group represents it. Groups are ordered by first
/// occurrence.
TieAggregation aggregate_ties(const DistanceMatrix& d, const Weights& w, double eps_tie = 1e-12);

/// Same, on coordinates: bitwise-identical rows merge first, then the
/// distance threshold applies.
TieAggregation aggregate_ties(const Configuration& config, const Weights& w, double eps_tie = 1e-12);

}  // namespace schoenberg
