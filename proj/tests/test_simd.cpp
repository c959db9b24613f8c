#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rlhmmddm/simd.hpp"
#include "rlhmmddm/types.hpp"
#include "rlhmmddm/wfpt.hpp"

using namespace rlhmmddm;

namespace {

struct Batch {
    simd::WfptShared p;
    std::vector<double> rt, drift;
    std::vector<std::uint8_t> choice;
};

Batch random_batch(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> ua(0.4, 3.0), ub(0.1, 0.9), ut(0.0, 0.3), uv(-4, 4), us(-0.05, 4.0);
    Batch b;
    b.p = {ua(rng), ub(rng), ut(rng)};
    for (std::size_t i = 0; i < n; ++i) {
        double s = us(rng);
        if (i % 7 == 3) s = 1e-4 * (1 + us(rng));  // very short decision times
        if (i % 11 == 5) s = 20.0 + 10 * us(rng);   // long tail
        b.rt.push_back(b.p.tau + s);
        b.drift.push_back(uv(rng));
        b.choice.push_back(static_cast<std::uint8_t>(rng() & 1));
    }
    return b;
}

struct Grads {
    std::vector<double> a, b, v, t;
    explicit Grads(std::size_t n) : a(n), b(n), v(n), t(n) {}
    simd::WfptGradient view() { return {a, b, v, t}; }
};

}  // namespace

TEST_CASE("scalar kernel reproduces log_joint_density") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        Batch b = random_batch(rng, 64);
        std::vector<double> out(b.rt.size());
        simd::wfpt_log_density_scalar(b.p, b.rt, b.choice, b.drift, out);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double ref = wfpt::log_joint_density(b.rt[i], b.choice[i], {b.p.alpha, b.p.b, b.drift[i], b.p.tau});
            CHECK(out[i] == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("scalar kernel gradient matches central differences") {
    std::mt19937_64 rng(22);
    const double h = 1e-6;
    for (int rep = 0; rep < 30; ++rep) {
        Batch b = random_batch(rng, 16);
        const std::size_t n = b.rt.size();
        std::vector<double> out(n), lo(n), hi(n);
        Grads g(n);
        auto view = g.view();
        simd::wfpt_log_density_scalar(b.p, b.rt, b.choice, b.drift, out, &view);
        auto fd = [&](auto perturb, std::size_t i) {
            Batch plus = b, minus = b;
            perturb(plus, +h);
            perturb(minus, -h);
            simd::wfpt_log_density_scalar(plus.p, plus.rt, plus.choice, plus.drift, hi);
            simd::wfpt_log_density_scalar(minus.p, minus.rt, minus.choice, minus.drift, lo);
            return (hi[i] - lo[i]) / (2 * h);
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (out[i] == wfpt::kLogDensityFloor) continue;
            if (b.rt[i] - b.p.tau < 5e-3) continue;  // too close to the floor cliff for FD
            auto tol = [](double x) { return doctest::Approx(x).epsilon(1e-5).scale(1.0); };
            CHECK(fd([](Batch& x, double d) { x.p.alpha += d; }, i) == tol(g.a[i]));
            CHECK(fd([](Batch& x, double d) { x.p.b += d; }, i) == tol(g.b[i]));
            CHECK(fd([i](Batch& x, double d) { x.drift[i] += d; }, i) == tol(g.v[i]));
            CHECK(fd([](Batch& x, double d) { x.p.tau += d; }, i) == tol(g.t[i]));
        }
    }
}

TEST_CASE("floored entries carry zero gradient") {
    simd::WfptShared p{1.0, 0.5, 0.2};
    std::vector<double> rt{0.1, 0.2, 0.2000001}, drift{1, 1, 1}, out(3);
    std::vector<std::uint8_t> ch{0, 1, 0};
    Grads g(3);
    auto view = g.view();
    simd::wfpt_log_density_scalar(p, rt, ch, drift, out, &view);
    CHECK(out[0] == wfpt::kLogDensityFloor);
    CHECK(out[1] == wfpt::kLogDensityFloor);
    CHECK(out[2] == wfpt::kLogDensityFloor);
    for (int i = 0; i < 3; ++i) CHECK(g.a[i] == 0.0);
}

TEST_CASE("kernel argument checks") {
    simd::WfptShared p{1.0, 0.5, 0.0};
    std::vector<double> rt(3, 1.0), drift(2, 0.0), out(3);
    std::vector<std::uint8_t> ch(3, 0);
    CHECK_THROWS_AS(simd::wfpt_log_density_scalar(p, rt, ch, drift, out), DomainError);
    drift.resize(3);
    p.b = 1.5;
    CHECK_THROWS_AS(simd::wfpt_log_density_scalar(p, rt, ch, drift, out), DomainError);
}

TEST_CASE("AVX2 kernel matches the scalar kernel") {
    if (!simd::supported(simd::Isa::avx2)) {
        MESSAGE("AVX2 not available; skipping");
        return;
    }
    std::mt19937_64 rng(23);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 31u, 200u}) {
        for (int rep = 0; rep < 20; ++rep) {
            Batch b = random_batch(rng, n);
            std::vector<double> o1(n), o2(n);
            Grads g1(n), g2(n);
            auto v1 = g1.view(), v2 = g2.view();
            simd::wfpt_log_density_scalar(b.p, b.rt, b.choice, b.drift, o1, &v1);
            simd::wfpt_log_density_avx2(b.p, b.rt, b.choice, b.drift, o2, &v2);
            for (std::size_t i = 0; i < n; ++i) {
                auto near = [](double x) { return doctest::Approx(x).epsilon(1e-11).scale(1.0); };
                CHECK(o2[i] == near(o1[i]));
                CHECK(g2.a[i] == near(g1.a[i]));
                CHECK(g2.b[i] == near(g1.b[i]));
                CHECK(g2.v[i] == near(g1.v[i]));
                CHECK(g2.t[i] == near(g1.t[i]));
            }
        }
    }
}

TEST_CASE("dispatch honours set_active_isa") {
    const simd::Isa before = simd::active_isa();
    simd::set_active_isa(simd::Isa::scalar);
    CHECK(simd::active_isa() == simd::Isa::scalar);
    simd::WfptShared p{1.2, 0.4, 0.1};
    std::vector<double> rt{0.5, 0.7, 1.0, 2.0, 0.3}, drift{0.5, -1, 2, 0, 1}, o1(5), o2(5);
    std::vector<std::uint8_t> ch{0, 1, 1, 0, 1};
    simd::wfpt_log_density(p, rt, ch, drift, o1);
    if (simd::supported(simd::Isa::avx2)) {
        simd::set_active_isa(simd::Isa::avx2);
        simd::wfpt_log_density(p, rt, ch, drift, o2);
        for (int i = 0; i < 5; ++i) CHECK(o2[i] == doctest::Approx(o1[i]).epsilon(1e-11));
    } else {
        CHECK_THROWS_AS(simd::set_active_isa(simd::Isa::avx2), DomainError);
    }
    simd::set_active_isa(before);
    CHECK(simd::to_string(simd::Isa::avx2) == "avx2");
}
