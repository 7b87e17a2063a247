#include "schoenberg/transforms.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace schoenberg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonnegative(double d) {
    if (!(d >= 0.0)) throw std::domain_error(fmt::format("squared distance must be >= 0, got {}", d));
}

void require_positive(double v, std::string_view what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(fmt::format("{} must be finite and > 0, got {}", what, v));
}

double parse_number(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument(fmt::format("not a number: '{}'", s));
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// key=value pairs separated by ','.
std::vector<std::pair<std::string_view, double>> parse_params(std::string_view s) {
    std::vector<std::pair<std::string_view, double>> out;
    if (trim(s).empty()) return out;
    for (auto item : split(s, ',')) {
        auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(fmt::format("expected key=value, got '{}'", item));
        out.emplace_back(trim(item.substr(0, eq)), parse_number(trim(item.substr(eq + 1))));
    }
    return out;
}

double single_param(std::string_view family, std::string_view params, std::string_view key) {
    auto kv = parse_params(params);
    if (kv.size() != 1 || kv[0].first != key)
        throw std::invalid_argument(fmt::format("'{}' takes exactly one parameter '{}'", family, key));
    return kv[0].second;
}

}  // namespace

double ExtendedReal::value() const {
    if (kind_ != Kind::finite) throw std::domain_error("infinite value has no finite representation");
    return value_;
}

std::string_view family_name(Family f) {
    switch (f) {
        case Family::identity: return "identity";
        case Family::power: return "power";
        case Family::exponential: return "exp";
        case Family::logarithmic: return "log";
        case Family::tukey: return "tukey";
        case Family::huber: return "huber";
        case Family::discrete: return "discrete";
        case Family::exp_mixture: return "mix";
    }
    return "?";
}

Transform::Transform(Family f, double q, double delta, std::vector<MixtureAtom> atoms)
    : family_(f), q_(q), delta_(delta), atoms_(std::move(atoms)) {}

Transform Transform::identity() { return Transform(Family::identity, 1.0, 1.0, {}); }

Transform Transform::power(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument(fmt::format("power exponent must lie in (0,1], got {}", q));
    if (q == 1.0) return identity();
    return Transform(Family::power, q, 1.0, {});
}

Transform Transform::exponential(double delta) {
    require_positive(delta, "delta");
    return Transform(Family::exponential, 1.0, delta, {});
}

Transform Transform::exponential_rate(double lambda) {
    require_positive(lambda, "lambda");
    return exponential(1.0 / lambda);
}

Transform Transform::logarithmic(double delta) {
    require_positive(delta, "delta");
    return Transform(Family::logarithmic, 1.0, delta, {});
}

Transform Transform::tukey(double delta) {
    require_positive(delta, "delta");
    return Transform(Family::tukey, 1.0, delta, {});
}

Transform Transform::huber(double delta) {
    require_positive(delta, "delta");
    return Transform(Family::huber, 1.0, delta, {});
}

Transform Transform::discrete() { return Transform(Family::discrete, 1.0, 1.0, {}); }

Transform Transform::mixture(std::vector<MixtureAtom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("mixture needs at least one atom");
    bool any_positive = false;
    for (const auto& a : atoms) {
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument(fmt::format("mixture weight must be >= 0, got {}", a.weight));
        require_positive(a.rate, "mixture rate");
        any_positive = any_positive || a.weight > 0.0;
    }
    if (!any_positive) throw std::invalid_argument("mixture needs at least one positive weight");
    return Transform(Family::exp_mixture, 1.0, 1.0, std::move(atoms));
}

Transform Transform::parse(std::string_view text) {
    text = trim(text);
    auto colon = text.find(':');
    auto name = trim(text.substr(0, colon));
    auto params = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

    if (name == "identity") {
        if (!trim(params).empty()) throw std::invalid_argument("'identity' takes no parameters");
        return identity();
    }
    if (name == "discrete") {
        if (!trim(params).empty()) throw std::invalid_argument("'discrete' takes no parameters");
        return discrete();
    }
    if (name == "power") return power(single_param(name, params, "q"));
    if (name == "log") return logarithmic(single_param(name, params, "delta"));
    if (name == "tukey") return tukey(single_param(name, params, "delta"));
    if (name == "huber") return huber(single_param(name, params, "delta"));
    if (name == "exp") {
        auto kv = parse_params(params);
        if (kv.size() == 1 && kv[0].first == "delta") return exponential(kv[0].second);
        if (kv.size() == 1 && kv[0].first == "lambda") return exponential_rate(kv[0].second);
        throw std::invalid_argument("'exp' takes exactly one of delta=... or lambda=...");
    }
    if (name == "mix") {
        std::vector<MixtureAtom> atoms;
        for (auto group : split(params, ';')) {
            auto kv = parse_params(group);
            if (kv.size() != 2) throw std::invalid_argument(fmt::format("mixture atom '{}' needs wK=..,lK=..", group));
            double w = -1.0, l = -1.0;
            for (auto [k, v] : kv) {
                if (!k.empty() && k.front() == 'w') w = v;
                else if (!k.empty() && k.front() == 'l') l = v;
                else throw std::invalid_argument(fmt::format("unknown mixture key '{}'", k));
            }
            atoms.push_back({w, l});
        }
        return mixture(std::move(atoms));
    }
    throw std::invalid_argument(fmt::format("unknown transform family '{}'", name));
}

std::string Transform::to_string() const {
    switch (family_) {
        case Family::identity: return "identity";
        case Family::discrete: return "discrete";
        case Family::power: return fmt::format("power:q={}", q_);
        case Family::exponential: return fmt::format("exp:delta={}", delta_);
        case Family::logarithmic: return fmt::format("log:delta={}", delta_);
        case Family::tukey: return fmt::format("tukey:delta={}", delta_);
        case Family::huber: return fmt::format("huber:delta={}", delta_);
        case Family::exp_mixture: {
            std::string s = "mix:";
            for (std::size_t k = 0; k < atoms_.size(); ++k) {
                if (k) s += ';';
                s += fmt::format("w{0}={1},l{0}={2}", k + 1, atoms_[k].weight, atoms_[k].rate);
            }
            return s;
        }
    }
    return "?";
}

bool operator==(const Transform& a, const Transform& b) {
    if (a.family_ != b.family_ || a.q_ != b.q_ || a.delta_ != b.delta_ || a.atoms_.size() != b.atoms_.size())
        return false;
    for (std::size_t k = 0; k < a.atoms_.size(); ++k)
        if (a.atoms_[k].weight != b.atoms_[k].weight || a.atoms_[k].rate != b.atoms_[k].rate) return false;
    return true;
}

double phi(const Transform& t, double d) {
    require_nonnegative(d);
    const double delta = t.delta();
    switch (t.family()) {
        case Family::identity: return d;
        case Family::power: return std::pow(d, t.q());
        case Family::exponential: return -std::expm1(-d / delta);
        case Family::logarithmic: return std::log1p(d / delta);
        case Family::tukey:
            if (d <= delta) return d - d * d / delta + d * d * d / (3.0 * delta * delta);
            return delta / 3.0;
        case Family::huber:
            if (d <= delta) return d;
            return 2.0 * std::sqrt(delta * d) - delta;
        case Family::discrete: return d > 0.0 ? 1.0 : 0.0;
        case Family::exp_mixture: {
            double s = 0.0;
            for (const auto& a : t.atoms()) s += a.weight * -std::expm1(-a.rate * d) / a.rate;
            return s;
        }
    }
    return 0.0;
}

ExtendedReal phi_prime(const Transform& t, double d) {
    require_nonnegative(d);
    const double delta = t.delta();
    switch (t.family()) {
        case Family::identity: return ExtendedReal::finite(1.0);
        case Family::power:
            if (d == 0.0) return ExtendedReal::plus_infinity();
            return ExtendedReal::finite(t.q() * std::pow(d, t.q() - 1.0));
        case Family::exponential: return ExtendedReal::finite(std::exp(-d / delta) / delta);
        case Family::logarithmic: return ExtendedReal::finite(1.0 / (delta + d));
        case Family::tukey: {
            if (d > delta) return ExtendedReal::finite(0.0);
            const double u = 1.0 - d / delta;
            return ExtendedReal::finite(u * u);
        }
        case Family::huber:
            if (d <= delta) return ExtendedReal::finite(1.0);
            return ExtendedReal::finite(std::sqrt(delta / d));
        case Family::discrete:
            return d == 0.0 ? ExtendedReal::plus_infinity() : ExtendedReal::finite(0.0);
        case Family::exp_mixture: {
            double s = 0.0;
            for (const auto& a : t.atoms()) s += a.weight * std::exp(-a.rate * d);
            return ExtendedReal::finite(s);
        }
    }
    return ExtendedReal::finite(0.0);
}

ExtendedReal phi_second(const Transform& t, double d) {
    require_nonnegative(d);
    const double delta = t.delta();
    switch (t.family()) {
        case Family::identity: return ExtendedReal::finite(0.0);
        case Family::power:
            if (d == 0.0) return ExtendedReal::minus_infinity();
            return ExtendedReal::finite(t.q() * (t.q() - 1.0) * std::pow(d, t.q() - 2.0));
        case Family::exponential: return ExtendedReal::finite(-std::exp(-d / delta) / (delta * delta));
        case Family::logarithmic: return ExtendedReal::finite(-1.0 / ((delta + d) * (delta + d)));
        case Family::tukey:
            if (d > delta) return ExtendedReal::finite(0.0);
            return ExtendedReal::finite(-2.0 * (1.0 - d / delta) / delta);
        case Family::huber:
            if (d <= delta) return ExtendedReal::finite(0.0);
            return ExtendedReal::finite(-0.5 * std::sqrt(delta) / (d * std::sqrt(d)));
        case Family::discrete:
            // The derivative of the unit step is a Dirac mass at the origin.
            return d == 0.0 ? ExtendedReal::minus_infinity() : ExtendedReal::finite(0.0);
        case Family::exp_mixture: {
            double s = 0.0;
            for (const auto& a : t.atoms()) s -= a.weight * a.rate * std::exp(-a.rate * d);
            return ExtendedReal::finite(s);
        }
    }
    return ExtendedReal::finite(0.0);
}

double psi(const Transform& t, double x) {
    if (x == 0.0) return 0.0;
    if (x < 0.0) return -psi(t, -x);
    switch (t.family()) {
        case Family::huber: return std::min(x, std::sqrt(t.delta()));
        case Family::tukey: {
            if (x * x > t.delta()) return 0.0;
            const double u = 1.0 - x * x / t.delta();
            return x * u * u;
        }
        case Family::power: return t.q() * std::pow(x, 2.0 * t.q() - 1.0);
        default: return phi_prime(t, x * x).value() * x;
    }
}

double chi(const Transform& t, double d) {
    require_nonnegative(d);
    if (t.family() == Family::power) {
        if (d == 0.0) throw std::domain_error("chi is undefined at D = 0 for a non-rectifiable transform");
        return t.q() * (2.0 * t.q() - 1.0) * std::pow(d, t.q() - 1.0);
    }
    auto first = phi_prime(t, d);
    auto second = phi_second(t, d);
    if (!first.is_finite() || !second.is_finite())
        throw std::domain_error("chi is undefined at D = 0 for a non-rectifiable transform");
    return first.value() + 2.0 * second.value() * d;
}

Classification classify(const Transform& t) {
    switch (t.family()) {
        case Family::identity: return {true, false};
        case Family::power: return {false, false};
        case Family::exponential: return {true, true};
        case Family::logarithmic: return {true, false};
        case Family::tukey: return {true, true};
        case Family::huber: return {true, false};
        case Family::discrete: return {false, true};
        case Family::exp_mixture: return {true, true};
    }
    return {true, false};
}

double breakpoint(const Transform& t) {
    return t.family() == Family::tukey || t.family() == Family::huber ? t.delta() : 0.0;
}

double characteristic_scale(const Transform& t) {
    switch (t.family()) {
        case Family::exponential:
        case Family::logarithmic:
        case Family::tukey:
        case Family::huber: return t.delta();
        case Family::exp_mixture: {
            double rate = 0.0;
            for (const auto& a : t.atoms()) rate = std::max(rate, a.rate);
            return 1.0 / rate;
        }
        default: return kInf;
    }
}

bool SchoenbergReport::passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const SignCondition& c) { return c.passed; });
}

SchoenbergReport verify_schoenberg(const std::function<double(double)>& f, std::span<const double> grid,
                                   int order, double scale, std::span<const double> kinks) {
    if (order < 2 || order > 4) throw std::invalid_argument("verification order must be in [2,4]");
    constexpr double eps = std::numeric_limits<double>::epsilon();
    // Relative step per derivative order. Orders 3 and 4 need wider stencils
    // or round-off swamps the difference quotient.
    constexpr std::array<double, 5> rel_step = {0.0, 1e-4, 1e-4, 1e-2, 1e-2};
    constexpr std::array<double, 5> coeff_abs_sum = {0.0, 1.0, 4.0, 3.0, 16.0};
    constexpr std::array<int, 5> half_width = {0, 1, 1, 2, 2};

    SchoenbergReport report;
    SignCondition origin;
    origin.order = 0;
    origin.points_checked = 1;
    const double f0 = f(0.0);
    origin.worst_violation = std::abs(f0);
    origin.passed = f0 == 0.0;
    report.conditions.push_back(origin);

    for (int r = 1; r <= order; ++r) {
        SignCondition cond;
        cond.order = r;
        const double sign = (r % 2 == 1) ? 1.0 : -1.0;
        for (double d : grid) {
            if (!(d > 0.0)) throw std::invalid_argument("verification grid must be strictly positive");
            const double h = rel_step[r] * std::min(d, scale);
            const bool near_kink = std::any_of(kinks.begin(), kinks.end(), [&](double k) {
                return std::abs(d - k) <= (half_width[r] + 0.5) * h;
            });
            if (near_kink) continue;

            const double fm2 = r >= 3 ? f(d - 2 * h) : 0.0;
            const double fm1 = f(d - h);
            const double f00 = f(d);
            const double fp1 = f(d + h);
            const double fp2 = r >= 3 ? f(d + 2 * h) : 0.0;
            double deriv = 0.0;
            switch (r) {
                case 1: deriv = (fp1 - fm1) / (2 * h); break;
                case 2: deriv = (fp1 - 2 * f00 + fm1) / (h * h); break;
                case 3: deriv = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h); break;
                case 4: deriv = (fp2 - 4 * fp1 + 6 * f00 - 4 * fm1 + fm2) / (h * h * h * h); break;
            }
            const double magnitude = std::max({std::abs(fm2), std::abs(fm1), std::abs(f00), std::abs(fp1), std::abs(fp2)});
            const double floor = 64.0 * eps * magnitude * coeff_abs_sum[r] / std::pow(h, r);
            ++cond.points_checked;
            const double wrong = -sign * deriv;
            if (wrong > cond.worst_violation) {
                cond.worst_violation = wrong;
                cond.worst_at = d;
            }
            if (wrong > floor) cond.passed = false;
        }
        report.conditions.push_back(cond);
    }
    return report;
}

SchoenbergReport verify_schoenberg(const Transform& t, std::span<const double> grid, int order) {
    const double kink = breakpoint(t);
    std::vector<double> kinks;
    if (kink > 0.0) kinks.push_back(kink);
    return verify_schoenberg([&t](double d) { return phi(t, d); }, grid, order, characteristic_scale(t), kinks);
}

}  // namespace schoenberg
