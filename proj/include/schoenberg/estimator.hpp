#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "schoenberg/geometry.hpp"
#include "schoenberg/transforms.hpp"

namespace schoenberg {

/// Starting profile for the fixed-point iteration.
struct Init {
    enum class Kind { weights, observation, custom, random };
    Kind kind = Kind::weights;
    std::size_t index = 0;
    std::optional<Profile> profile;
    std::uint64_t seed = 0;

    static Init from_weights() { return {}; }
    /// Starts next to observation i, at 0.99 e_i + 0.01 w. The exact vertex
    /// would pin every non-rectifiable transform to x_i regardless of q.
    static Init observation(std::size_t i) { return {Kind::observation, i, std::nullopt, 0}; }
    static Init custom(Profile p) { return {Kind::custom, 0, std::move(p), 0}; }
    /// Uniform draw on the simplex.
    static Init random(std::uint64_t seed) { return {Kind::random, 0, std::nullopt, seed}; }
};

struct EstimateOptions {
    Init init;
    double tol_alpha = 1e-12;
    double tol_objective = 1e-14;  // relative
    int max_iter = 10000;
    double eps_concentrated = 1e-10;  // relative to the mean off-diagonal distance
    bool damping = true;
    int max_halvings = 30;
    int stability_probes = 64;
    std::uint64_t stability_seed = 1;
};

enum class Regime { distributed, concentrated, boundary };

std::string_view regime_name(Regime r);

struct StabilityReport {
    double sufficient_lhs = 0.0;   // sum_i w_i [phi'(D_ia) + 2 phi''(D_ia) D_ia]
    double directional_min = 0.0;  // min over probed b of the cos^2-weighted sum
    bool stable = true;
    int probes = 0;                // number of directions evaluated
    bool exact = false;            // true in one dimension, where cos^2 = 1
};

struct EstimateResult {
    Profile alpha;
    Vector d_centroid;
    double gamma = 0.0;
    Regime regime = Regime::distributed;
    std::optional<std::size_t> concentrated_at;
    int iterations = 0;
    bool converged = false;
    std::optional<StabilityReport> stability;  // absent for concentrated results and n = 1
    double entropy = 0.0;
    std::optional<double> strain;  // absent when the transformed inertia vanishes (n = 1)
};

/// Gamma = sum_i w_i phi(D_ia).
double objective(const DistanceMatrix& d, const Weights& w, const Transform& t, const Profile& alpha);

/// Emitted by iterate_once when phi' is infinite (or the centroid sits within
/// eps of observation `index`) under a non-rectifiable transform.
struct Singularity {
    std::size_t index;
};

/// One step of alpha_i <- w_i phi'(D_ia) / sum_j w_j phi'(D_ja). When every
/// phi'(D_ia) vanishes (a flat region of a bounded transform) the input
/// profile is returned unchanged.
std::variant<Profile, Singularity> iterate_once(const DistanceMatrix& d, const Weights& w, const Transform& t,
                                                const Profile& alpha, double eps_abs = 0.0);

/// Fixed-point minimization of the transformed inertia from opts.init.
/// Non-convergence is reported through `converged`, not thrown.
///
/// Under a non-rectifiable transform the iteration stops as soon as the
/// centroid comes within eps_concentrated * mean(D) of an observation and
/// the result is concentrated there. If several observations are that close
/// (unaggregated ties) the mass is split among them in proportion to w.
EstimateResult estimate(const DistanceMatrix& d, const Weights& w, const Transform& t,
                        const EstimateOptions& opts = {});

/// w, then 0.99 e_i + 0.01 w for each i, then `random_starts` profiles
/// drawn from a flat Dirichlet seeded with `seed`.
std::vector<Profile> default_starts(const Weights& w, std::size_t random_starts = 0, std::uint64_t seed = 0);

/// Runs estimate from each start and returns the distinct fixed points
/// sorted by Gamma. Empty `starts` means default_starts(w).
/// Two results are the same point when their centroids are within
/// 1e-6 * mean(D) in squared distance.
std::vector<EstimateResult> multi_start(const DistanceMatrix& d, const Weights& w, const Transform& t,
                                        const EstimateOptions& opts = {}, std::vector<Profile> starts = {});

/// Second-order check at a distributed profile. The sufficient condition is
/// exact; the directional minimum probes b over all observations plus
/// `probes` random profiles and is exact when the data are one-dimensional.
/// Throws std::domain_error when some phi'(D_ia) is infinite.
StabilityReport stability_check(const Profile& alpha, const DistanceMatrix& d, const Weights& w,
                                const Transform& t, int probes = 64, std::uint64_t seed = 1);

/// Same, for a finished result; throws std::domain_error for concentrated ones.
StabilityReport stability_check(const EstimateResult& result, const DistanceMatrix& d, const Weights& w,
                                const Transform& t, int probes = 64, std::uint64_t seed = 1);

/// Gamma(a) = sum_i w_i phi((x_i - a)^2) at each grid point, for 1-D data.
std::vector<double> grid_scan_1d(std::span<const double> x, const Weights& w, const Transform& t,
                                 std::span<const double> grid);

}  // namespace schoenberg
