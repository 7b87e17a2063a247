#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schoenberg/estimator.hpp"

namespace schoenberg {

/// H(alpha) = -sum alpha_j ln alpha_j with 0 ln 0 = 0.
double entropy(const Profile& alpha);

/// phi applied entrywise; labels are kept.
DistanceMatrix apply_transform(const DistanceMatrix& d, const Transform& t);

/// Delta~(w) = 1/2 sum_ij w_i w_j phi(D_ij), the least attainable transformed
/// dispersion when the centroid may leave the image of the embedding.
double transformed_inertia(const DistanceMatrix& d, const Weights& w, const Transform& t);

/// gamma / Delta~(w). Throws std::domain_error when Delta~ is zero.
double strain(double gamma, const DistanceMatrix& d, const Weights& w, const Transform& t);

/// Small-q limit of the strain of a power estimate concentrated on i0:
/// 2 (1 - w_i0) / (1 - sum_j w_j^2).
double limit_strain_concentrated(const Weights& w, std::size_t i0);

/// Which parameter of a family a sweep varies.
enum class SweepParameter { q, delta, lambda };

/// Builds the transform of `family` at parameter value `value`. Supports
/// power (q), exp (delta or lambda), log/tukey/huber (delta).
Transform transform_at(Family family, SweepParameter param, double value);

struct SweepRecord {
    double param = 0.0;
    double gamma = 0.0;
    double entropy = 0.0;
    std::optional<double> strain;
    Regime regime = Regime::distributed;
    bool converged = false;
    int iterations = 0;
    Vector alpha;
    Vector projection;      // sum_i alpha_i x_ib, when a configuration was given
    int minima = 0;         // distinct multi-start minima, when requested
    std::string error;      // non-empty when this grid point failed
};

struct SweepOptions {
    EstimateOptions estimate;
    bool multi_start = false;
    std::size_t random_starts = 0;  // added to the deterministic multi-start set
    std::uint64_t seed = 0;
};

/// Runs estimate at every grid value. Each point is solved twice, warm from
/// the previous point's profile (smoothed towards w when it is a vertex) and
/// cold from w; the lower-Gamma solution is kept and seeds the next point.
/// The grid must be monotone. Cold starts run concurrently.
std::vector<SweepRecord> sweep(const DistanceMatrix& d, const Weights& w, Family family, SweepParameter param,
                               const std::vector<double>& grid, const SweepOptions& opts = {},
                               const Configuration* config = nullptr);

/// Linear grid start, start+step, ... up to stop (inclusive within 1e-9 step).
std::vector<double> linear_grid(double start, double stop, double step);
/// `count` log-spaced values from start to stop inclusive.
std::vector<double> log_grid(double start, double stop, int count);

}  // namespace schoenberg
