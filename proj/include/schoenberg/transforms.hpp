#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace schoenberg {

/// A real number or a signed infinity. Slopes of non-rectifiable transforms
/// are infinite at the origin; that case is carried as a tag, never as an
/// overflowed double.
class ExtendedReal {
public:
    static constexpr ExtendedReal finite(double v) { return ExtendedReal(Kind::finite, v); }
    static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::plus_inf, 0.0); }
    static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::minus_inf, 0.0); }

    constexpr bool is_finite() const { return kind_ == Kind::finite; }
    constexpr bool is_plus_infinity() const { return kind_ == Kind::plus_inf; }
    constexpr bool is_minus_infinity() const { return kind_ == Kind::minus_inf; }

    /// Throws std::domain_error when infinite.
    double value() const;

private:
    enum class Kind { finite, plus_inf, minus_inf };
    constexpr ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

enum class Family { identity, power, exponential, logarithmic, tukey, huber, discrete, exp_mixture };

std::string_view family_name(Family f);

/// One atom of a finite mixing measure: weight * (1 - exp(-rate D)) / rate.
struct MixtureAtom {
    double weight;
    double rate;
};

struct Classification {
    bool rectifiable;
    bool bounded;
    friend bool operator==(const Classification&, const Classification&) = default;
};

/// A Schoenberg transformation phi of squared Euclidean distances together
/// with its parameters. Immutable; construct through the named factories.
///
/// Parametrizations (delta is a squared characteristic length):
///   power        D^q, 0 < q <= 1 (q = 1 collapses to identity)
///   exponential  1 - exp(-D/delta)
///   logarithmic  ln(1 + D/delta)
///   tukey        D - D^2/delta + D^3/(3 delta^2) for D <= delta, delta/3 beyond
///   huber        D for D <= delta, 2 sqrt(delta D) - delta beyond
///   discrete     0 at D = 0, 1 elsewhere
///   exp_mixture  sum_k w_k (1 - exp(-l_k D)) / l_k
class Transform {
public:
    static Transform identity();
    static Transform power(double q);
    static Transform exponential(double delta);
    static Transform exponential_rate(double lambda);
    static Transform logarithmic(double delta);
    static Transform tukey(double delta);
    static Transform huber(double delta);
    static Transform discrete();
    static Transform mixture(std::vector<MixtureAtom> atoms);

    /// Parses the compact notation used on the command line, e.g.
    /// `power:q=0.7`, `exp:lambda=0.5`, `mix:w1=0.5,l1=1;w2=0.5,l2=10`.
    /// Throws std::invalid_argument on malformed input.
    static Transform parse(std::string_view text);

    Family family() const { return family_; }
    double q() const { return q_; }
    double delta() const { return delta_; }
    std::span<const MixtureAtom> atoms() const { return atoms_; }

    /// Canonical string form; Transform::parse(t.to_string()) == t.
    std::string to_string() const;

    friend bool operator==(const Transform&, const Transform&);

private:
    Transform(Family f, double q, double delta, std::vector<MixtureAtom> atoms);

    Family family_;
    double q_ = 1.0;
    double delta_ = 1.0;
    std::vector<MixtureAtom> atoms_;
};

/// phi(D). Throws std::domain_error for D < 0.
double phi(const Transform& t, double d);

/// phi'(D) >= 0; +infinity at D = 0 for power (q < 1) and discrete.
/// Piecewise families use the left branch at D = delta.
ExtendedReal phi_prime(const Transform& t, double d);

/// phi''(D) <= 0; -infinity at D = 0 for non-rectifiable families.
ExtendedReal phi_second(const Transform& t, double d);

/// psi(x) = phi'(x^2) x, extended oddly; psi(0) = 0. Huber and Tukey use
/// their closed forms (clipped identity, bisquare).
double psi(const Transform& t, double x);

/// chi(D) = phi'(D) + 2 phi''(D) D, the slope of psi against sqrt(D).
/// Throws std::domain_error for D < 0, and for D = 0 when the transform
/// is not rectifiable.
double chi(const Transform& t, double d);

Classification classify(const Transform& t);
inline bool is_rectifiable(const Transform& t) { return classify(t).rectifiable; }

/// Value at which a piecewise family switches branch; 0 for smooth families.
double breakpoint(const Transform& t);

// ---------------------------------------------------------------------------
// Numerical verification of the alternating-sign characterization.

struct SignCondition {
    int order = 0;           // derivative order r (1..4); 0 is the phi(0) = 0 check
    bool passed = true;
    double worst_violation = 0.0;  // largest magnitude on the wrong side of zero
    double worst_at = 0.0;         // grid point of the worst violation
    int points_checked = 0;
};

struct SchoenbergReport {
    std::vector<SignCondition> conditions;
    bool passed() const;
};

/// Checks phi(0) = 0 and the sign pattern phi^(odd) >= 0, phi^(even) <= 0
/// on `grid` up to derivative `order` (2..4) using central differences.
/// `scale` is the characteristic length of the function; stencil steps are
/// proportional to min(D, scale). Points whose stencil straddles one of
/// `kinks` are skipped. A wrong-sign value only counts as a violation when
/// it exceeds the stencil's round-off floor.
SchoenbergReport verify_schoenberg(const std::function<double(double)>& f,
                                   std::span<const double> grid, int order,
                                   double scale = 1.0,
                                   std::span<const double> kinks = {});

SchoenbergReport verify_schoenberg(const Transform& t, std::span<const double> grid, int order);

/// Characteristic length used for finite-difference steps.
double characteristic_scale(const Transform& t);

}  // namespace schoenberg
