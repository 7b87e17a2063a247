#include "schoenberg/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace schoenberg {

namespace {

using Index = Eigen::Index;

constexpr double kSumTolerance = 1e-12;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(fmt::format("{}: size mismatch ({} vs {})", what, a, b));
}

// Union-find over observation indices; the root is always the smallest index.
class Partition {
public:
    explicit Partition(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

Eigen::SelfAdjointEigenSolver<Matrix> scaled_gram_eigen(const DistanceMatrix& d, const Weights& w) {
    require_size(d.size(), w.size(), "scaled Gram matrix");
    const Vector s = w.values().array().sqrt();
    const Matrix m = s.asDiagonal() * double_center(d, w) * s.asDiagonal();
    return Eigen::SelfAdjointEigenSolver<Matrix>(m);
}

TieAggregation build_aggregation(const DistanceMatrix& d, const Weights& w, Partition& part) {
    const std::size_t n = d.size();
    std::vector<std::size_t> group_of(n);
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> group_of_root(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = part.find(i);
        if (group_of_root[r] == n) {
            group_of_root[r] = members.size();
            members.emplace_back();
        }
        group_of[i] = group_of_root[r];
        members[group_of[i]].push_back(i);
    }

    const std::size_t m = members.size();
    Matrix reduced(idx(m), idx(m));
    Vector mass(idx(m));
    std::vector<std::string> labels(m);
    for (std::size_t a = 0; a < m; ++a) {
        double total = 0.0;
        for (std::size_t i : members[a]) {
            total += w[i];
            if (!labels[a].empty()) labels[a] += '|';
            labels[a] += d.labels()[i];
        }
        mass(idx(a)) = total;
        for (std::size_t b = 0; b < m; ++b) reduced(idx(a), idx(b)) = a == b ? 0.0 : d(members[a][0], members[b][0]);
    }
    return TieAggregation{DistanceMatrix(std::move(reduced), std::move(labels)), Weights::normalized(mass),
                          std::move(group_of), std::move(members), Configuration{}};
}

}  // namespace

Weights::Weights(Vector f) : f_(std::move(f)) {
    if (f_.size() == 0) throw std::invalid_argument("weights must not be empty");
    for (Index i = 0; i < f_.size(); ++i)
        if (!(f_(i) > 0.0) || !std::isfinite(f_(i)))
            throw std::invalid_argument(fmt::format("weight {} must be finite and > 0, got {}", i, f_(i)));
    if (std::abs(f_.sum() - 1.0) > kSumTolerance)
        throw std::invalid_argument(fmt::format("weights must sum to 1, got {:.17g}", f_.sum()));
}

Weights Weights::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("weights must not be empty");
    return Weights(Vector::Constant(idx(n), 1.0 / static_cast<double>(n)));
}

Weights Weights::normalized(const Vector& raw) {
    if (raw.size() == 0) throw std::invalid_argument("weights must not be empty");
    for (Index i = 0; i < raw.size(); ++i)
        if (!(raw(i) > 0.0) || !std::isfinite(raw(i)))
            throw std::invalid_argument(fmt::format("weight {} must be finite and > 0, got {}", i, raw(i)));
    return Weights(raw / raw.sum());
}

Profile::Profile(Vector alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() == 0) throw std::invalid_argument("profile must not be empty");
    for (Index i = 0; i < alpha_.size(); ++i)
        if (!(alpha_(i) >= 0.0) || !std::isfinite(alpha_(i)))
            throw std::invalid_argument(fmt::format("profile entry {} must be finite and >= 0, got {}", i, alpha_(i)));
    if (std::abs(alpha_.sum() - 1.0) > kSumTolerance)
        throw std::invalid_argument(fmt::format("profile must sum to 1, got {:.17g}", alpha_.sum()));
}

Profile Profile::vertex(std::size_t n, std::size_t i) {
    if (i >= n) throw std::out_of_range(fmt::format("vertex {} out of range for n = {}", i, n));
    Vector e = Vector::Zero(idx(n));
    e(idx(i)) = 1.0;
    return Profile(std::move(e));
}

Profile Profile::normalized(const Vector& raw) {
    const double s = raw.sum();
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("profile needs a positive finite total");
    return Profile(raw / s);
}

DistanceMatrix::DistanceMatrix(Matrix d, std::vector<std::string> labels) : d_(std::move(d)), labels_(std::move(labels)) {
    if (d_.rows() != d_.cols() || d_.rows() == 0)
        throw std::invalid_argument(fmt::format("distance matrix must be square and non-empty, got {}x{}", d_.rows(), d_.cols()));
    const Index n = d_.rows();
    if (labels_.empty())
        for (Index i = 0; i < n; ++i) labels_.push_back(std::to_string(i + 1));
    require_size(labels_.size(), static_cast<std::size_t>(n), "distance labels");

    double scale = 1.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0)
                throw std::invalid_argument(fmt::format("distance ({},{}) must be finite and >= 0, got {}", i + 1, j + 1, d_(i, j)));
            scale = std::max(scale, d_(i, j));
        }
    const double tol = 1e-12 * scale;
    for (Index i = 0; i < n; ++i) {
        if (d_(i, i) > tol) throw std::invalid_argument(fmt::format("diagonal entry {} is not zero: {}", i + 1, d_(i, i)));
        d_(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) {
            if (std::abs(d_(i, j) - d_(j, i)) > tol)
                throw std::invalid_argument(fmt::format("matrix is not symmetric at ({},{}): {} vs {}", i + 1, j + 1, d_(i, j), d_(j, i)));
            const double avg = 0.5 * (d_(i, j) + d_(j, i));
            d_(i, j) = d_(j, i) = avg;
        }
    }
}

double DistanceMatrix::mean_off_diagonal() const {
    const auto n = d_.rows();
    if (n < 2) return 0.0;
    return d_.sum() / static_cast<double>(n * (n - 1));
}

bool DistanceMatrix::has_ties() const {
    for (Index i = 0; i < d_.rows(); ++i)
        for (Index j = i + 1; j < d_.cols(); ++j)
            if (d_(i, j) == 0.0) return true;
    return false;
}

Vector Configuration::explained_inertia() const {
    Vector out = Vector::Zero(eigenvalues.size());
    if (total_inertia > 0.0) out = eigenvalues / total_inertia;
    return out;
}

DistanceMatrix sq_euclidean(const Configuration& config) {
    const Index n = config.coords.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (config.coords.row(i) - config.coords.row(j)).squaredNorm();
    return DistanceMatrix(std::move(d), config.labels);
}

double inertia(const DistanceMatrix& d, const Weights& w) {
    require_size(d.size(), w.size(), "inertia");
    return 0.5 * w.values().dot(d.values() * w.values());
}

double inertia(const DistanceMatrix& d, const Profile& alpha) {
    require_size(d.size(), alpha.size(), "inertia");
    return 0.5 * alpha.values().dot(d.values() * alpha.values());
}

Vector centroid_sq_distances(const DistanceMatrix& d, const Profile& alpha) {
    require_size(d.size(), alpha.size(), "centroid distances");
    const Vector& a = alpha.values();
    const Vector pull = d.values() * a;
    const double half_quad = 0.5 * a.dot(pull);
    Vector out = pull.array() - half_quad;

    // Near a vertex the two terms above cancel. For the observation holding
    // most of the mass, evaluate -1/2 z'Dz with z = alpha - e_i built from the
    // small entries instead; its error scales with D_ia rather than with D.
    Index heavy = 0;
    if (a.maxCoeff(&heavy) > 0.5) {
        const Index n = a.size();
        double rest_mass = 0.0, cross = 0.0, inner = 0.0;
        for (Index k = 0; k < n; ++k) {
            if (k == heavy) continue;
            rest_mass += a(k);
            cross += a(k) * d.values()(heavy, k);
            double row = 0.0;
            for (Index j = 0; j < n; ++j)
                if (j != heavy) row += a(j) * d.values()(j, k);
            inner += a(k) * row;
        }
        out(heavy) = rest_mass * cross - 0.5 * inner;
    }

    const double tol = 1e-12 * std::max(1.0, d.values().maxCoeff());
    for (Index i = 0; i < out.size(); ++i) {
        if (out(i) < 0.0) {
            if (out(i) < -tol)
                throw std::domain_error(fmt::format("negative centroid distance {} at observation {}: input is not squared Euclidean", out(i), i + 1));
            out(i) = 0.0;
        }
    }
    return out;
}

double centroid_separation(const DistanceMatrix& d, const Profile& alpha, const Profile& beta) {
    require_size(d.size(), alpha.size(), "centroid separation");
    require_size(d.size(), beta.size(), "centroid separation");
    const Vector z = beta.values() - alpha.values();
    return std::max(0.0, -0.5 * z.dot(d.values() * z));
}

HuygensReport verify_huygens(const Configuration& config, const Weights& w) {
    require_size(config.size(), w.size(), "Huygens check");
    const DistanceMatrix d = sq_euclidean(config);
    const Eigen::RowVectorXd mean = w.values().transpose() * config.coords;
    Vector to_mean(config.coords.rows());
    for (Index i = 0; i < to_mean.size(); ++i) to_mean(i) = (config.coords.row(i) - mean).squaredNorm();

    HuygensReport r;
    const double delta = inertia(d, w);
    r.weak_deviation = std::abs(delta - w.values().dot(to_mean));
    const Vector row_sums = d.values() * w.values();
    r.strong_deviation = (row_sums.array() - to_mean.array() - delta).abs().maxCoeff();
    r.centroid_deviation = (centroid_sq_distances(d, Profile::from_weights(w)) - to_mean).cwiseAbs().maxCoeff();
    return r;
}

double cos_angle(double d_ab, double d_ia, double d_ib) {
    if (!(d_ab > 0.0) || !(d_ia > 0.0)) throw std::domain_error("degenerate angle: a coincides with b or with x_i");
    const double c = (d_ab + d_ia - d_ib) / (2.0 * std::sqrt(d_ab * d_ia));
    if (std::abs(c) > 1.0 + 1e-9) throw std::domain_error(fmt::format("cosine {} outside [-1,1]: distances are not Euclidean", c));
    return std::clamp(c, -1.0, 1.0);
}

Matrix double_center(const DistanceMatrix& d, const Weights& w) {
    require_size(d.size(), w.size(), "double centering");
    const Vector pull = d.values() * w.values();
    const double delta = 0.5 * w.values().dot(pull);
    const Vector to_mean = pull.array() - delta;
    Matrix centered = d.values();
    centered.colwise() -= to_mean;
    centered.rowwise() -= to_mean.transpose();
    Matrix b = -0.5 * centered;
    return 0.5 * (b + b.transpose());
}

EuclideanCertificate certify_euclidean(const DistanceMatrix& d, const Weights& w, double rel_tol) {
    const auto eig = scaled_gram_eigen(d, w);
    EuclideanCertificate c;
    c.min_eigenvalue = eig.eigenvalues().minCoeff();
    c.max_eigenvalue = eig.eigenvalues().maxCoeff();
    c.passed = c.min_eigenvalue >= -rel_tol * std::max(c.max_eigenvalue, 0.0);
    return c;
}

std::size_t euclidean_rank(const DistanceMatrix& d, const Weights& w) {
    const auto eig = scaled_gram_eigen(d, w);
    const double top = eig.eigenvalues().maxCoeff();
    if (!(top > 0.0)) return 0;
    return static_cast<std::size_t>((eig.eigenvalues().array() > 1e-10 * top).count());
}

Configuration classical_mds(const DistanceMatrix& d, const Weights& w, std::size_t dim) {
    const std::size_t n = d.size();
    if (dim < 1 || dim + 1 > n)
        throw std::invalid_argument(fmt::format("MDS dimension must be in [1, {}], got {}", n == 0 ? 0 : n - 1, dim));
    const auto eig = scaled_gram_eigen(d, w);
    const Vector& values = eig.eigenvalues();  // ascending
    const double top = values.maxCoeff();
    const double bottom = values.minCoeff();
    if (bottom < -1e-8 * std::max(top, 0.0))
        throw std::domain_error(fmt::format("distance matrix is not squared Euclidean: most negative eigenvalue {:.17g} (largest {:.17g})", bottom, top));

    const double zero_cut = 1e-10 * std::max(top, 0.0);
    Configuration c;
    c.labels = d.labels();
    c.coords = Matrix::Zero(idx(n), idx(dim));
    c.eigenvalues = Vector::Zero(idx(dim));
    for (Index k = 0; k < values.size(); ++k)
        if (values(k) > zero_cut) c.total_inertia += values(k);

    const Vector inv_sqrt_w = w.values().array().sqrt().inverse();
    for (std::size_t b = 0; b < dim; ++b) {
        const Index k = values.size() - 1 - idx(b);
        if (!(values(k) > zero_cut)) break;
        Vector u = eig.eigenvectors().col(k);
        Index arg = 0;
        u.cwiseAbs().maxCoeff(&arg);
        if (u(arg) < 0.0) u = -u;
        c.eigenvalues(idx(b)) = values(k);
        c.coords.col(idx(b)) = std::sqrt(values(k)) * u.cwiseProduct(inv_sqrt_w);
    }
    return c;
}

TieAggregation aggregate_ties(const DistanceMatrix& d, const Weights& w, double eps_tie) {
    require_size(d.size(), w.size(), "tie aggregation");
    if (!(eps_tie >= 0.0)) throw std::invalid_argument("eps_tie must be >= 0");
    const std::size_t n = d.size();
    const double threshold = eps_tie * d.mean_off_diagonal();
    Partition part(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (d(i, j) <= threshold) part.merge(i, j);
    return build_aggregation(d, w, part);
}

TieAggregation aggregate_ties(const Configuration& config, const Weights& w, double eps_tie) {
    require_size(config.size(), w.size(), "tie aggregation");
    if (!(eps_tie >= 0.0)) throw std::invalid_argument("eps_tie must be >= 0");
    const std::size_t n = config.size();
    Configuration labelled = config;
    if (labelled.labels.empty())
        for (std::size_t i = 0; i < n; ++i) labelled.labels.push_back(std::to_string(i + 1));
    const DistanceMatrix d = sq_euclidean(labelled);

    auto same_bits = [&](std::size_t i, std::size_t j) {
        for (Index k = 0; k < config.coords.cols(); ++k)
            if (std::bit_cast<std::uint64_t>(config.coords(idx(i), k)) != std::bit_cast<std::uint64_t>(config.coords(idx(j), k)))
                return false;
        return true;
    };
    const double threshold = eps_tie * d.mean_off_diagonal();
    Partition part(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (same_bits(i, j) || d(i, j) <= threshold) part.merge(i, j);

    TieAggregation agg = build_aggregation(d, w, part);
    agg.configuration.labels = agg.distances.labels();
    agg.configuration.coords.resize(idx(agg.members.size()), config.coords.cols());
    for (std::size_t a = 0; a < agg.members.size(); ++a)
        agg.configuration.coords.row(idx(a)) = config.coords.row(idx(agg.members[a][0]));
    return agg;
}

}  // namespace schoenberg
