#include <cmath>
#include <random>

#include "doctest.h"
#include "rlhmmddm/rl.hpp"

using namespace rlhmmddm;

namespace {

SubjectData make_subject(std::initializer_list<std::array<double, 3>> sar) {
    SubjectData s;
    s.id = "x";
    int j = 1;
    for (const auto& t : sar) s.trials.push_back({j++, static_cast<int>(t[0]), static_cast<int>(t[1]), 0.5, t[2]});
    return s;
}

SubjectData random_subject(std::mt19937_64& rng, int J) {
    SubjectData s;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int j = 1; j <= J; ++j)
        s.trials.push_back({j, static_cast<int>(rng() & 1), static_cast<int>(rng() & 1), 0.3 + u(rng), u(rng) < 0.5 ? 1.0 : u(rng)});
    return s;
}

}  // namespace

TEST_CASE("init_q fills every cell") {
    const rl::QTable a = rl::init_q();
    const rl::QTable b = rl::init_q(0.5);
    for (int act = 0; act < 2; ++act) {
        for (int s = 0; s < 2; ++s) {
            CHECK(a.q[act][s] == 0.0);
            CHECK(b.q[act][s] == 0.5);
        }
    }
    CHECK(rl::contrast(a, 0) == 0.0);
    CHECK(rl::contrast(b, 1) == 0.0);
}

TEST_CASE("update moves only the visited cell") {
    rl::QTable q = rl::init_q(0.2);
    q.q[1][1] = 0.5;
    const rl::QTable u = rl::update(q, 1, 1, 1.0, 0.1);
    CHECK(u.q[1][1] == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(u.q[0][0] == 0.2);
    CHECK(u.q[0][1] == 0.2);
    CHECK(u.q[1][0] == 0.2);

    const rl::QTable same = rl::update(q, 1, 1, 0.5, 0.3);
    CHECK(same.q[1][1] == 0.5);
}

TEST_CASE("constant reward converges geometrically") {
    rl::QTable q = rl::init_q();
    const double beta = 0.2, r = 0.8;
    for (int k = 1; k <= 30; ++k) {
        q = rl::update(q, 0, 1, r, beta);
        CHECK(r - q.q[1][0] == doctest::Approx(r * std::pow(1.0 - beta, k)).epsilon(1e-12));
    }
}

TEST_CASE("contrast is q[1][s] - q[0][s] and antisymmetric") {
    rl::QTable q = rl::init_q();
    q.q[1][0] = 0.8;
    q.q[0][0] = 0.3;
    CHECK(rl::contrast(q, 0) == doctest::Approx(0.5));
    std::swap(q.q[1][0], q.q[0][0]);
    CHECK(rl::contrast(q, 0) == doctest::Approx(-0.5));
}

TEST_CASE("learning rate outside (0,1) is rejected") {
    const rl::QTable q = rl::init_q();
    CHECK_THROWS_AS(rl::update(q, 0, 0, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(rl::update(q, 0, 0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(rl::update(q, 0, 0, 1.0, std::nan("")), DomainError);
}

TEST_CASE("hand trace of three trials") {
    const SubjectData s = make_subject({{1, 1, 1}, {1, 1, 0}, {1, 0, 1}});
    const auto z = rl::trajectory_contrasts(s, 0.5);
    REQUIRE(z.size() == 3);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.5);
    CHECK(z[2] == 0.25);

    const auto one = rl::trajectory_contrasts(make_subject({{0, 1, 1}}), 0.3);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 0.0);
}

TEST_CASE("trajectory matches a naive loop and is order sensitive") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const SubjectData s = random_subject(rng, 80);
        const double beta = 0.01 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
        double q[2][2] = {{0.1, 0.1}, {0.1, 0.1}};
        const auto z = rl::trajectory_contrasts(s, beta, 0.1);
        for (std::size_t j = 0; j < s.trials.size(); ++j) {
            const auto& t = s.trials[j];
            CHECK(z[j] == doctest::Approx(q[1][t.s] - q[0][t.s]).epsilon(1e-14));
            q[t.a][t.s] += beta * (t.r - q[t.a][t.s]);
            CHECK(std::fabs(z[j]) <= 1.0);
        }
    }
    SubjectData a = make_subject({{1, 1, 1}, {1, 0, 0}, {1, 1, 1}, {1, 0, 1}});
    SubjectData b = a;
    std::swap(b.trials[0], b.trials[3]);
    for (int j = 0; j < 4; ++j) b.trials[j].j = j + 1;
    CHECK(rl::trajectory_contrasts(a, 0.4) != rl::trajectory_contrasts(b, 0.4));
}

TEST_CASE("derivative of contrasts in beta matches central differences") {
    std::mt19937_64 rng(5);
    const SubjectData s = random_subject(rng, 60);
    for (double beta : {0.02, 0.1, 0.5, 0.9}) {
        const auto path = rl::trajectory_contrasts_with_derivative(s, beta);
        const double h = 1e-6;
        const auto up = rl::trajectory_contrasts(s, beta + h), dn = rl::trajectory_contrasts(s, beta - h);
        for (std::size_t j = 0; j < s.trials.size(); ++j) {
            CHECK(path.z[j] == rl::trajectory_contrasts(s, beta)[j]);
            CHECK(path.dz_dbeta[j] == doctest::Approx((up[j] - dn[j]) / (2 * h)).epsilon(1e-6).scale(1.0));
        }
    }
}
