#include <doctest.h>

#include <stdexcept>

#include "schoenberg/copper.hpp"
#include "schoenberg/diagnostics.hpp"
#include "schoenberg/geometry.hpp"
#include "support.hpp"

using namespace schoenberg;
using doctest::Approx;

namespace {

Configuration line(std::initializer_list<double> xs) {
    Configuration c;
    c.coords.resize(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index i = 0;
    for (double x : xs) c.coords(i++, 0) = x;
    return c;
}

double max_reconstruction_error(const DistanceMatrix& d, const Configuration& c) {
    return (sq_euclidean(c).values() - d.values()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("squared Euclidean distances") {
    const auto d = sq_euclidean(line({0, 1, 2}));
    Matrix expected(3, 3);
    expected << 0, 1, 4, 1, 0, 1, 4, 1, 0;
    CHECK(d.values() == expected);
    CHECK(sq_euclidean(line({5})).values() == Matrix::Zero(1, 1));
    Configuration c;
    c.coords.resize(2, 2);
    c.coords << 0, 0, 3, 4;
    CHECK(sq_euclidean(c)(0, 1) == 25.0);
}

TEST_CASE("distance matrix validation") {
    Matrix m(2, 2);
    m << 0, 1, 2, 0;
    CHECK_THROWS_AS(DistanceMatrix{m}, std::invalid_argument);
    m << 1, 1, 1, 0;
    CHECK_THROWS_AS(DistanceMatrix{m}, std::invalid_argument);
    m << 0, -1, -1, 0;
    CHECK_THROWS_AS(DistanceMatrix{m}, std::invalid_argument);
    CHECK_THROWS_AS(Weights(Vector::Constant(2, 0.4)), std::invalid_argument);
    CHECK_THROWS_AS(Weights(Vector{{1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("inertia") {
    const auto d = sq_euclidean(line({0, 1, 2}));
    CHECK(inertia(d, Weights::uniform(3)) == Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(inertia(sq_euclidean(line({3})), Weights::uniform(1)) == 0.0);
    CHECK(inertia(sq_euclidean(line({0, 3})), Weights::uniform(2)) == Approx(9.0 / 4.0).epsilon(1e-15));
}

TEST_CASE("centroid distances from profiles") {
    const auto d = sq_euclidean(line({0, 1, 2}));
    const Vector v = centroid_sq_distances(d, Profile::from_weights(Weights::uniform(3)));
    CHECK(v(0) == Approx(1.0));
    CHECK(std::abs(v(1)) < 1e-15);
    CHECK(v(2) == Approx(1.0));
    const Vector at1 = centroid_sq_distances(d, Profile::vertex(3, 1));
    CHECK(at1 == d.values().col(1));

    support::Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = support::uniform_int(rng, 2, 30);
        const auto c = support::random_configuration(rng, n, support::uniform_int(rng, 1, 5), 3.0);
        const auto dd = sq_euclidean(c);
        const auto w = support::random_weights(rng, n);
        const auto alpha = support::random_profile(rng, n);
        const Vector got = centroid_sq_distances(dd, alpha);
        const Eigen::RowVectorXd a = alpha.values().transpose() * c.coords;
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(got(Eigen::Index(i)) - support::coord_sq_dist(c.coords.row(Eigen::Index(i)), a)) < 1e-10);
        const Vector dw = centroid_sq_distances(dd, Profile::from_weights(w));
        CHECK(w.values().dot(dw) == Approx(inertia(dd, w)).epsilon(1e-12));
    }
}

TEST_CASE("non-Euclidean input is detected when D_ia goes negative") {
    Matrix m(3, 3);
    m << 0, 1, 100, 1, 0, 1, 100, 1, 0;
    CHECK_THROWS_AS(centroid_sq_distances(DistanceMatrix(m), Profile::normalized(Vector::Ones(3))), std::domain_error);
}

TEST_CASE("quadratic form of a profile difference") {
    support::Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = support::uniform_int(rng, 2, 20);
        const auto c = support::random_configuration(rng, n, 3);
        const auto d = sq_euclidean(c);
        const auto alpha = support::random_profile(rng, n);
        const auto beta = support::random_profile(rng, n);
        const Vector z = beta.values() - alpha.values();
        const Eigen::RowVectorXd a = alpha.values().transpose() * c.coords;
        const Eigen::RowVectorXd b = beta.values().transpose() * c.coords;
        CHECK(std::abs(z.dot(d.values() * z) + 2 * support::coord_sq_dist(a, b)) < 1e-10);
        CHECK(std::abs(centroid_separation(d, alpha, beta) - support::coord_sq_dist(a, b)) < 1e-10);
    }
}

TEST_CASE("Huygens identities") {
    CHECK(verify_huygens(line({0, 1, 2}), Weights::uniform(3)).passed(1e-12));
    CHECK(verify_huygens(line({-1, 4}), Weights(Vector{{0.25, 0.75}})).passed(1e-15));
    support::Rng rng(9);
    CHECK(verify_huygens(support::random_configuration(rng, 20, 3), support::random_weights(rng, 20)).passed(1e-10));
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = support::uniform_int(rng, 1, 50);
        const auto c = support::random_configuration(rng, n, support::uniform_int(rng, 1, 5));
        CHECK(verify_huygens(c, support::random_weights(rng, n)).passed(1e-10));
    }
}

TEST_CASE("cosine formula") {
    CHECK(cos_angle(1, 1, 4) == -1.0);
    CHECK(std::abs(cos_angle(1, 1, 2)) < 1e-15);
    CHECK(cos_angle(1, 1, 0) == 1.0);
    CHECK_THROWS_AS(cos_angle(0, 1, 1), std::domain_error);
    CHECK_THROWS_AS(cos_angle(1, 1, 9), std::domain_error);
}

TEST_CASE("double centering") {
    const Matrix b = double_center(sq_euclidean(line({0, 2})), Weights::uniform(2));
    Matrix expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK((b - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(double_center(sq_euclidean(line({1})), Weights::uniform(1)) == Matrix::Zero(1, 1));

    support::Rng rng(10);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = support::uniform_int(rng, 2, 15);
        const auto c = support::random_configuration(rng, n, support::uniform_int(rng, 1, 4));
        const auto w = support::random_weights(rng, n);
        const auto d = sq_euclidean(c);
        const Matrix bb = double_center(d, w);
        CHECK((bb - bb.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((w.values().transpose() * bb).cwiseAbs().maxCoeff() < 1e-12);
        // Gram matrix of the w-centred coordinates
        const Eigen::RowVectorXd mean = w.values().transpose() * c.coords;
        const Matrix centred = c.coords.rowwise() - mean;
        CHECK((bb - centred * centred.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        const auto cert = certify_euclidean(d, w);
        CHECK(cert.passed);
        CHECK(cert.min_eigenvalue >= -1e-8 * cert.max_eigenvalue);
    }
}

TEST_CASE("classical scaling") {
    const auto c = classical_mds(sq_euclidean(line({0, 1, 2})), Weights::uniform(3), 1);
    CHECK(std::abs(std::abs(c.coords(0, 0)) - 1.0) < 1e-12);
    CHECK(std::abs(c.coords(1, 0)) < 1e-12);
    CHECK(c.coords(0, 0) == Approx(-c.coords(2, 0)).epsilon(1e-12));
    CHECK(c.explained_inertia().sum() == Approx(1.0));

    support::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = support::uniform_int(rng, 3, 12);
        const std::size_t p = support::uniform_int(rng, 1, 4);
        const auto x = support::random_configuration(rng, n, p);
        const auto w = support::random_weights(rng, n);
        const auto d = sq_euclidean(x);
        const auto full = classical_mds(d, w, n - 1);
        CHECK(max_reconstruction_error(d, full) < 1e-8 * std::max(1.0, d.values().maxCoeff()));
        CHECK(full.explained_inertia().sum() == Approx(1.0).epsilon(1e-10));
        for (Eigen::Index b = 1; b < full.eigenvalues.size(); ++b) CHECK(full.eigenvalues(b) <= full.eigenvalues(b - 1));
        // w-centred and w-uncorrelated
        const Matrix cov = full.coords.transpose() * w.values().asDiagonal() * full.coords;
        CHECK((w.values().transpose() * full.coords).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((cov - Matrix(cov.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
        // round trip at the data dimension
        const auto again = classical_mds(d, w, std::min(p, n - 1));
        CHECK(max_reconstruction_error(d, again) < 1e-8 * std::max(1.0, d.values().maxCoeff()));
    }
    CHECK_THROWS_AS(classical_mds(sq_euclidean(line({0, 1})), Weights::uniform(2), 2), std::invalid_argument);
}

TEST_CASE("non-Euclidean matrices are refused by scaling") {
    Matrix m(3, 3);
    m << 0, 1, 9, 1, 0, 1, 9, 1, 0;
    const DistanceMatrix d(m);
    CHECK_FALSE(certify_euclidean(d, Weights::uniform(3)).passed);
    try {
        classical_mds(d, Weights::uniform(3), 1);
        FAIL("expected a domain error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
}

TEST_CASE("tie aggregation") {
    const auto copper = copper_configuration();
    const auto w = Weights::uniform(copper.size());
    const auto exact = aggregate_ties(sq_euclidean(copper), w, 0.0);
    CHECK(exact.distances.size() == 16);
    const auto by_coords = aggregate_ties(copper, w);
    CHECK(by_coords.distances.size() == 16);
    CHECK(by_coords.weights.values().sum() == Approx(1.0));
    // heaviest group is 3.70, four copies
    const auto heaviest = std::max_element(by_coords.weights.values().begin(), by_coords.weights.values().end());
    CHECK(*heaviest == Approx(4.0 / 24.0));
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            if (i != j) CHECK(by_coords.distances(i, j) > 0.0);

    support::Rng rng(13);
    const auto distinct = support::random_configuration(rng, 8, 2);
    const auto none = aggregate_ties(distinct, Weights::uniform(8));
    CHECK_FALSE(none.changed());
    CHECK(none.distances.values() == sq_euclidean(distinct).values());

    Configuration same = line({2, 2, 2, 2});
    const auto one = aggregate_ties(same, Weights::uniform(4));
    CHECK(one.distances.size() == 1);
    CHECK(one.weights[0] == Approx(1.0));
}

TEST_CASE("tie aggregation is transitive and idempotent") {
    // 0 ~ 1 and 1 ~ 2 under the threshold, 0 and 2 farther apart
    Configuration c = line({0.0, 1e-7, 2e-7, 5.0, 9.0});
    const auto w = Weights::uniform(5);
    const double eps = 2e-14 / sq_euclidean(c).mean_off_diagonal();
    const auto agg = aggregate_ties(sq_euclidean(c), w, eps);
    CHECK(agg.distances.size() == 3);
    CHECK(agg.members[0] == std::vector<std::size_t>{0, 1, 2});
    const auto twice = aggregate_ties(agg.distances, agg.weights, eps);
    CHECK_FALSE(twice.changed());
    CHECK(twice.distances.values() == agg.distances.values());

    support::Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = support::random_configuration(rng, 10, 2);
        for (int k = 0; k < 4; ++k) x.coords.row(Eigen::Index(support::uniform_int(rng, 0, 9))) = x.coords.row(0);
        const auto a = aggregate_ties(x, Weights::uniform(10));
        const auto b = aggregate_ties(a.configuration, a.weights);
        CHECK_FALSE(b.changed());
        CHECK(b.weights.values() == a.weights.values());
    }
}

TEST_CASE("Schoenberg transforms keep random configurations Euclidean") {
    support::Rng rng(15);
    for (const auto& t : support::all_families()) {
        if (t.family() == Family::tukey || t.family() == Family::huber) continue;  // piecewise, see acceptance
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = support::uniform_int(rng, 2, 10);
            const auto x = support::random_configuration(rng, n, support::uniform_int(rng, 1, 3));
            const auto cert = certify_euclidean(apply_transform(sq_euclidean(x), t), support::random_weights(rng, n));
            CHECK(cert.passed);
        }
    }
}
