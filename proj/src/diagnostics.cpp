#include "schoenberg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

#include <fmt/format.h>

namespace schoenberg {

namespace {

using Index = Eigen::Index;

SweepRecord summarize(double param, const EstimateResult& r, const Configuration* config) {
    SweepRecord rec;
    rec.param = param;
    rec.gamma = r.gamma;
    rec.entropy = r.entropy;
    rec.strain = r.strain;
    rec.regime = r.regime;
    rec.converged = r.converged;
    rec.iterations = r.iterations;
    rec.alpha = r.alpha.values();
    if (config) rec.projection = config->coords.transpose() * r.alpha.values();
    return rec;
}

// Vertices would pin a non-rectifiable transform on the spot, so a warm start
// from a profile with empty entries is pulled slightly towards w.
Profile warm_start(const Vector& previous, const Weights& w) {
    if (previous.minCoeff() > 0.0) return Profile::normalized(previous);
    return Profile::normalized(0.99 * previous + 0.01 * w.values());
}

void require_monotone(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    bool up = true, down = true;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        up = up && grid[k] > grid[k - 1];
        down = down && grid[k] < grid[k - 1];
    }
    if (!up && !down) throw std::invalid_argument("sweep grid must be strictly monotone");
}

}  // namespace

double entropy(const Profile& alpha) {
    double h = 0.0;
    for (Index i = 0; i < alpha.values().size(); ++i) {
        const double a = alpha.values()(i);
        if (a > 0.0) h -= a * std::log(a);
    }
    return std::max(h, 0.0);
}

DistanceMatrix apply_transform(const DistanceMatrix& d, const Transform& t) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = phi(t, d.values()(i, j));
    return DistanceMatrix(std::move(m), d.labels());
}

double transformed_inertia(const DistanceMatrix& d, const Weights& w, const Transform& t) {
    if (d.size() != w.size()) throw std::invalid_argument("transformed inertia: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) s += w[i] * w[j] * phi(t, d(i, j));
    return s;  // the 1/2 cancels the symmetric double count
}

double strain(double gamma, const DistanceMatrix& d, const Weights& w, const Transform& t) {
    const double dispersion = transformed_inertia(d, w, t);
    if (!(dispersion > 0.0)) throw std::domain_error("strain is undefined when the transformed inertia is zero");
    return gamma / dispersion;
}

double limit_strain_concentrated(const Weights& w, std::size_t i0) {
    if (i0 >= w.size()) throw std::out_of_range("limit strain: index out of range");
    const double purity = w.values().squaredNorm();
    if (!(purity < 1.0)) throw std::domain_error("limit strain is undefined for a single observation");
    return 2.0 * (1.0 - w[i0]) / (1.0 - purity);
}

Transform transform_at(Family family, SweepParameter param, double value) {
    switch (family) {
        case Family::power:
            if (param == SweepParameter::q) return Transform::power(value);
            break;
        case Family::exponential:
            if (param == SweepParameter::delta) return Transform::exponential(value);
            if (param == SweepParameter::lambda) return Transform::exponential_rate(value);
            break;
        case Family::logarithmic:
            if (param == SweepParameter::delta) return Transform::logarithmic(value);
            break;
        case Family::tukey:
            if (param == SweepParameter::delta) return Transform::tukey(value);
            break;
        case Family::huber:
            if (param == SweepParameter::delta) return Transform::huber(value);
            break;
        default: break;
    }
    throw std::invalid_argument(fmt::format("family '{}' cannot be swept over this parameter", family_name(family)));
}

std::vector<SweepRecord> sweep(const DistanceMatrix& d, const Weights& w, Family family, SweepParameter param,
                               const std::vector<double>& grid, const SweepOptions& opts, const Configuration* config) {
    require_monotone(grid);
    if (config && config->size() != d.size()) throw std::invalid_argument("sweep: configuration and distances differ in size");
    // Surface parameter errors before any work is scheduled.
    for (double v : grid) (void)transform_at(family, param, v);

    std::vector<std::future<EstimateResult>> cold;
    cold.reserve(grid.size());
    for (double v : grid) {
        EstimateOptions o = opts.estimate;
        o.init = Init::from_weights();
        cold.push_back(std::async(std::launch::async, [&d, &w, family, param, v, o] {
            return estimate(d, w, transform_at(family, param, v), o);
        }));
    }

    std::vector<SweepRecord> out;
    out.reserve(grid.size());
    std::optional<Vector> previous;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Transform t = transform_at(family, param, grid[k]);
        try {
            EstimateResult best = cold[k].get();
            if (previous) {
                EstimateOptions o = opts.estimate;
                o.init = Init::custom(warm_start(*previous, w));
                EstimateResult warm = estimate(d, w, t, o);
                if (warm.gamma <= best.gamma + 1e-12 * std::abs(best.gamma)) best = std::move(warm);
            }
            SweepRecord rec = summarize(grid[k], best, config);
            if (opts.multi_start) rec.minima = static_cast<int>(multi_start(d, w, t, opts.estimate, default_starts(w, opts.random_starts, opts.seed)).size());
            previous = best.alpha.values();
            out.push_back(std::move(rec));
        } catch (const std::exception& e) {
            SweepRecord rec;
            rec.param = grid[k];
            rec.error = e.what();
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step != 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be non-zero");
    if ((stop - start) / step < 0.0) throw std::invalid_argument("grid step points away from the stop value");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) g.push_back(start + static_cast<double>(k) * step);
    return g;
}

std::vector<double> log_grid(double start, double stop, int count) {
    if (!(start > 0.0) || !(stop > 0.0)) throw std::invalid_argument("log grid bounds must be > 0");
    if (count < 1) throw std::invalid_argument("log grid needs at least one point");
    if (count == 1) return {start};
    std::vector<double> g;
    const double a = std::log(start), b = std::log(stop);
    for (int k = 0; k < count; ++k) g.push_back(std::exp(a + (b - a) * k / (count - 1)));
    g.front() = start;
    g.back() = stop;
    return g;
}

}  // namespace schoenberg
