#include "schoenberg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "schoenberg/diagnostics.hpp"

namespace schoenberg {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_conforming(const DistanceMatrix& d, const Weights& w) {
    if (d.size() != w.size())
        throw std::invalid_argument(fmt::format("distance matrix has {} rows but {} weights", d.size(), w.size()));
}

bool is_median_power(const Transform& t) {
    return t.family() == Family::power && std::abs(t.q() - 0.5) < 1e-12;
}

// Whether an observation can be a concentrated minimizer. A power slope
// D^(q-1) only outweighs the pull of the other observations when q <= 1/2;
// for q > 1/2 the fixed point stays distributed, however close to x_i.
bool vertex_attracts(const Transform& t) {
    if (t.family() == Family::discrete) return true;
    return t.family() == Family::power && t.q() <= 0.5 + 1e-12;
}

constexpr int kStallSteps = 5;

Profile smoothed_vertex(const Weights& w, std::size_t i) {
    Vector v = 0.01 * w.values();
    v(idx(i)) += 0.99;
    return Profile::normalized(v);
}

Profile random_profile(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> draw(1.0);
    Vector v(idx(n));
    for (Index i = 0; i < v.size(); ++i) v(i) = draw(rng);
    return Profile::normalized(v);
}

Profile initial_profile(const Weights& w, const Init& init) {
    switch (init.kind) {
        case Init::Kind::weights: return Profile::from_weights(w);
        case Init::Kind::observation:
            if (init.index >= w.size()) throw std::out_of_range(fmt::format("start observation {} out of range", init.index));
            return smoothed_vertex(w, init.index);
        case Init::Kind::custom:
            if (!init.profile || init.profile->size() != w.size())
                throw std::invalid_argument("custom start profile missing or of the wrong size");
            return *init.profile;
        case Init::Kind::random: {
            std::mt19937_64 rng(init.seed);
            return random_profile(w.size(), rng);
        }
    }
    return Profile::from_weights(w);
}

// Observations within eps_abs of the centroid.
std::vector<std::size_t> coincident(const Vector& d_centroid, double eps_abs) {
    std::vector<std::size_t> out;
    for (Index i = 0; i < d_centroid.size(); ++i)
        if (d_centroid(i) <= eps_abs) out.push_back(static_cast<std::size_t>(i));
    return out;
}

Profile concentrated_profile(const Weights& w, const std::vector<std::size_t>& at) {
    Vector v = Vector::Zero(idx(w.size()));
    for (std::size_t i : at) v(idx(i)) = w[i];
    return Profile::normalized(v);
}

double clamped_cos(double d_ab, double d_ia, double d_ib) {
    return std::clamp((d_ab + d_ia - d_ib) / (2.0 * std::sqrt(d_ab * d_ia)), -1.0, 1.0);
}

void finish(EstimateResult& r, const DistanceMatrix& d, const Weights& w, const Transform& t, const EstimateOptions& opts) {
    r.d_centroid = centroid_sq_distances(d, r.alpha);
    r.gamma = objective(d, w, t, r.alpha);
    r.entropy = entropy(r.alpha);
    const double dispersion = transformed_inertia(d, w, t);
    if (dispersion > 0.0) r.strain = r.gamma / dispersion;
    if (r.regime != Regime::concentrated && d.size() > 1) {
        bool finite_slopes = true;
        for (Index i = 0; i < r.d_centroid.size(); ++i)
            finite_slopes = finite_slopes && phi_prime(t, r.d_centroid(i)).is_finite();
        if (finite_slopes) r.stability = stability_check(r.alpha, d, w, t, opts.stability_probes, opts.stability_seed);
    }
}

}  // namespace

std::string_view regime_name(Regime r) {
    switch (r) {
        case Regime::distributed: return "distributed";
        case Regime::concentrated: return "concentrated";
        case Regime::boundary: return "boundary";
    }
    return "?";
}

double objective(const DistanceMatrix& d, const Weights& w, const Transform& t, const Profile& alpha) {
    require_conforming(d, w);
    const Vector dia = centroid_sq_distances(d, alpha);
    double g = 0.0;
    for (Index i = 0; i < dia.size(); ++i) g += w.values()(i) * phi(t, dia(i));
    return g;
}

std::variant<Profile, Singularity> iterate_once(const DistanceMatrix& d, const Weights& w, const Transform& t,
                                                const Profile& alpha, double eps_abs) {
    require_conforming(d, w);
    const Vector dia = centroid_sq_distances(d, alpha);
    const bool rectifiable = is_rectifiable(t);
    Vector next(dia.size());
    for (Index i = 0; i < dia.size(); ++i) {
        if (!rectifiable && dia(i) <= eps_abs) return Singularity{static_cast<std::size_t>(i)};
        const ExtendedReal slope = phi_prime(t, dia(i));
        if (!slope.is_finite()) return Singularity{static_cast<std::size_t>(i)};
        next(i) = w.values()(i) * slope.value();
    }
    if (!(next.sum() > 0.0)) return alpha;
    return Profile::normalized(next);
}

EstimateResult estimate(const DistanceMatrix& d, const Weights& w, const Transform& t, const EstimateOptions& opts) {
    require_conforming(d, w);
    if (!(opts.tol_alpha > 0.0) || !(opts.tol_objective > 0.0) || opts.max_iter < 1)
        throw std::invalid_argument("tolerances must be > 0 and max_iter >= 1");
    const std::size_t n = d.size();
    const bool rectifiable = is_rectifiable(t);

    EstimateResult r{Profile::from_weights(w), Vector{}, 0.0, Regime::distributed, std::nullopt, 0, true,
                     std::nullopt, 0.0, std::nullopt};

    if (n == 1) {
        if (!rectifiable) {
            r.regime = Regime::concentrated;
            r.concentrated_at = 0;
        }
        finish(r, d, w, t, opts);
        return r;
    }

    if (t.family() == Family::discrete) {
        // Gamma = 1 - w_i at x_i and 1 elsewhere; the heaviest observation wins.
        Index best = 0;
        w.values().maxCoeff(&best);
        r.alpha = Profile::vertex(n, static_cast<std::size_t>(best));
        r.regime = Regime::concentrated;
        r.concentrated_at = static_cast<std::size_t>(best);
        finish(r, d, w, t, opts);
        return r;
    }

    const double eps_abs = opts.eps_concentrated * d.mean_off_diagonal();
    auto concentrate = [&](const std::vector<std::size_t>& at) {
        r.alpha = concentrated_profile(w, at);
        r.regime = Regime::concentrated;
        r.concentrated_at = at.front();
        r.converged = true;
    };

    Profile alpha = initial_profile(w, opts.init);
    double gamma = objective(d, w, t, alpha);
    const bool attracting = vertex_attracts(t);
    const double detect = attracting ? eps_abs : 0.0;
    r.converged = false;
    int stalled = 0;
    double last_change = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iter; ++it) {
        r.iterations = it;
        if (attracting) {
            auto near = coincident(centroid_sq_distances(d, alpha), eps_abs);
            if (!near.empty()) {
                concentrate(near);
                break;
            }
        }
        auto step = iterate_once(d, w, t, alpha, detect);
        if (auto* s = std::get_if<Singularity>(&step)) {
            if (attracting) {
                auto near = coincident(centroid_sq_distances(d, alpha), eps_abs);
                concentrate(near.empty() ? std::vector<std::size_t>{s->index} : near);
                break;
            }
            // Sitting exactly on an observation that cannot hold the minimum.
            alpha = Profile::normalized(0.99 * alpha.values() + 0.01 * w.values());
            gamma = objective(d, w, t, alpha);
            continue;
        }
        Vector candidate = std::get<Profile>(step).values();
        double candidate_gamma = objective(d, w, t, Profile::normalized(candidate));
        const double slack = 1e-12 * std::max(1.0, std::abs(gamma));
        if (opts.damping && candidate_gamma > gamma + slack) {
            int halvings = 0;
            while (candidate_gamma > gamma + slack && halvings < opts.max_halvings) {
                candidate = 0.5 * (alpha.values() + candidate);
                candidate_gamma = objective(d, w, t, Profile::normalized(candidate));
                ++halvings;
            }
            if (candidate_gamma > gamma + slack) break;  // no descent left along the fixed-point direction
        }
        Profile next = Profile::normalized(candidate);
        const double change = (next.values() - alpha.values()).cwiseAbs().maxCoeff();
        const double rel = std::abs(gamma - candidate_gamma) / std::max(std::abs(gamma), std::numeric_limits<double>::min());
        alpha = std::move(next);
        gamma = candidate_gamma;
        // A flat objective stops the loop only once the profile has also
        // stopped contracting; otherwise a slow linear tail is cut off early.
        if (rel >= opts.tol_objective) stalled = 0;
        else if (change >= last_change) ++stalled;
        last_change = change;
        if (change < opts.tol_alpha || stalled >= kStallSteps) {
            r.converged = true;
            break;
        }
    }

    if (r.regime != Regime::concentrated) {
        r.alpha = alpha;
        if (attracting) {
            auto near = coincident(centroid_sq_distances(d, alpha), eps_abs);
            if (!near.empty()) concentrate(near);
        }
        if (r.regime != Regime::concentrated && is_median_power(t)) r.regime = Regime::boundary;
    }
    finish(r, d, w, t, opts);
    return r;
}

std::vector<Profile> default_starts(const Weights& w, std::size_t random_starts, std::uint64_t seed) {
    std::vector<Profile> starts{Profile::from_weights(w)};
    for (std::size_t i = 0; i < w.size(); ++i) starts.push_back(smoothed_vertex(w, i));
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < random_starts; ++k) starts.push_back(random_profile(w.size(), rng));
    return starts;
}

std::vector<EstimateResult> multi_start(const DistanceMatrix& d, const Weights& w, const Transform& t,
                                        const EstimateOptions& opts, std::vector<Profile> starts) {
    require_conforming(d, w);
    if (starts.empty()) starts = default_starts(w);
    std::vector<std::future<EstimateResult>> jobs;
    jobs.reserve(starts.size());
    for (const auto& s : starts) {
        EstimateOptions o = opts;
        o.init = Init::custom(s);
        jobs.push_back(std::async(std::launch::async, [&d, &w, &t, o] { return estimate(d, w, t, o); }));
    }
    std::vector<EstimateResult> all;
    all.reserve(jobs.size());
    for (auto& j : jobs) all.push_back(j.get());

    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all[a].gamma < all[b].gamma; });

    const double eps_dedup = 1e-6 * d.mean_off_diagonal();
    std::vector<EstimateResult> distinct;
    for (std::size_t k : order) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const EstimateResult& e) {
            return centroid_separation(d, e.alpha, all[k].alpha) <= eps_dedup;
        });
        if (!seen) distinct.push_back(std::move(all[k]));
    }
    return distinct;
}

StabilityReport stability_check(const Profile& alpha, const DistanceMatrix& d, const Weights& w, const Transform& t,
                                int probes, std::uint64_t seed) {
    require_conforming(d, w);
    const Vector dia = centroid_sq_distances(d, alpha);
    const Index n = dia.size();
    Vector first(n), second(n);
    for (Index i = 0; i < n; ++i) {
        const auto p1 = phi_prime(t, dia(i));
        const auto p2 = phi_second(t, dia(i));
        if (!p1.is_finite() || !p2.is_finite())
            throw std::domain_error("stability check needs finite phi' at every observation (distributed profile)");
        first(i) = p1.value();
        second(i) = p2.value();
    }

    StabilityReport rep;
    rep.sufficient_lhs = 0.0;
    for (Index i = 0; i < n; ++i) rep.sufficient_lhs += w.values()(i) * (first(i) + 2.0 * second(i) * dia(i));
    const double scale = w.values().dot(first);
    const double tol = 1e-10 * std::max(scale, 1e-300);

    if (euclidean_rank(d, w) <= 1) {
        rep.directional_min = rep.sufficient_lhs;
        rep.exact = true;
        rep.probes = 0;
        rep.stable = rep.directional_min >= -tol;
        return rep;
    }

    auto bracket = [&](double d_ab, const Vector& d_ib) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) {
            double c2 = 0.0;
            if (dia(i) > 0.0) {
                const double c = clamped_cos(d_ab, dia(i), d_ib(i));
                c2 = c * c;
            }
            s += w.values()(i) * (first(i) + 2.0 * second(i) * dia(i) * c2);
        }
        return s;
    };

    rep.directional_min = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
        if (!(dia(j) > 0.0)) continue;
        rep.directional_min = std::min(rep.directional_min, bracket(dia(j), d.values().col(j)));
        ++rep.probes;
    }
    std::mt19937_64 rng(seed);
    for (int k = 0; k < probes; ++k) {
        const Profile beta = random_profile(static_cast<std::size_t>(n), rng);
        const double d_ab = centroid_separation(d, alpha, beta);
        if (!(d_ab > 0.0)) continue;
        rep.directional_min = std::min(rep.directional_min, bracket(d_ab, centroid_sq_distances(d, beta)));
        ++rep.probes;
    }
    if (rep.probes == 0) rep.directional_min = rep.sufficient_lhs;
    rep.stable = rep.directional_min >= -tol;
    return rep;
}

StabilityReport stability_check(const EstimateResult& result, const DistanceMatrix& d, const Weights& w,
                                const Transform& t, int probes, std::uint64_t seed) {
    if (result.regime == Regime::concentrated)
        throw std::domain_error("stability check does not apply to a concentrated result");
    return stability_check(result.alpha, d, w, t, probes, seed);
}

std::vector<double> grid_scan_1d(std::span<const double> x, const Weights& w, const Transform& t,
                                 std::span<const double> grid) {
    if (x.size() != w.size()) throw std::invalid_argument("grid scan: data and weights differ in size");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double a : grid) {
        double g = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) g += w[i] * phi(t, (x[i] - a) * (x[i] - a));
        out.push_back(g);
    }
    return out;
}

}  // namespace schoenberg
