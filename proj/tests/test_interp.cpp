#include "doctest.h"

#include "hjb/interp.hpp"
#include "hjb/models.hpp"
#include "properties.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace hjb;

TEST_CASE("linear interpolation basics") {
    const Mesh1D m = build_uniform_mesh(0.0, 2.0, 3);
    const std::vector<double> v = {0.0, 10.0, 4.0};
    CHECK(interp_linear(m, v, 0.5) == doctest::Approx(5.0));
    CHECK(interp_linear(m, v, 1.0) == 10.0);
    CHECK_THROWS_AS(interp_linear(m, std::vector<double>{1.0, 2.0}, 0.5),
                    std::invalid_argument);

    // Affine reproduction.
    const auto g = [](double x) { return -3.0 + 2.5 * x; };
    const std::vector<double> affine = {g(0.0), g(1.0), g(2.0)};
    CHECK(interp_linear(m, affine, 1.3) == doctest::Approx(g(1.3)).epsilon(1e-14));
}

TEST_CASE("limited cubic hermite") {
    const Mesh1D m = build_uniform_mesh(0.0, 3.0, 4);
    SUBCASE("flat secant forces a constant segment") {
        const std::vector<double> v = {0.0, 1.0, 1.0, 2.0};
        CHECK(interp_limited_cubic(m, v, 1.5) == doctest::Approx(1.0));
    }
    SUBCASE("affine data reproduce exactly") {
        const std::vector<double> v = {0.0, 2.0, 4.0, 6.0};
        for (double x : {0.3, 1.5, 2.9})
            CHECK(interp_limited_cubic(m, v, x) == doctest::Approx(2.0 * x).epsilon(1e-14));
    }
    SUBCASE("exact at nodes") {
        const std::vector<double> v = {4.0, -1.0, 7.0, 2.0};
        for (int i = 0; i < 4; ++i)
            CHECK(interp_limited_cubic(m, v, m[i]) == v[static_cast<size_t>(i)]);
    }
}

TEST_CASE("limited cubic stays within brackets on butterfly data") {
    // Brute-force clamp check over every interval of a 65-node sample of the
    // kinked payoff.
    const UvParams p;
    const Mesh1D m = build_uniform_mesh(std::log(60.0), std::log(160.0), 65);
    std::vector<double> v(65);
    for (int i = 0; i < 65; ++i) v[static_cast<size_t>(i)] = uv_payoff(std::exp(m[i]), p);
    for (int i = 0; i + 1 < m.size(); ++i) {
        const double lo = std::min(v[static_cast<size_t>(i)], v[static_cast<size_t>(i) + 1]);
        const double hi = std::max(v[static_cast<size_t>(i)], v[static_cast<size_t>(i) + 1]);
        for (int s = 0; s <= 20; ++s) {
            const double x = m[i] + (m[i + 1] - m[i]) * static_cast<double>(s) / 20.0;
            const double value = interp_limited_cubic(m, v, std::min(x, m.hi()));
            CHECK(value >= lo - 1e-12);
            CHECK(value <= hi + 1e-12);
        }
    }
}

TEST_CASE("transfer basics") {
    const Mesh1D src = build_uniform_mesh(0.0, 1.0, 9);
    InterpKind kind;

    SUBCASE("identity on the same mesh") {
        std::vector<double> v(9);
        for (int i = 0; i < 9; ++i) v[static_cast<size_t>(i)] = std::sin(3.0 * src[i]);
        CHECK(transfer(src, v, src, kind) == v);
    }
    SUBCASE("constant data survive a shifted mesh") {
        const Mesh1D dst = build_uniform_mesh(0.0625, 1.0625, 9);
        const std::vector<double> v(9, 3.25);
        for (double value : transfer(src, v, dst, kind)) CHECK(value == 3.25);
    }
    SUBCASE("half-spacing shift averages neighbours on convex data") {
        const double h = src.spacing();
        const Mesh1D dst = build_uniform_mesh(0.5 * h, 1.0 + 0.5 * h, 9);
        std::vector<double> v(9);
        for (int i = 0; i < 9; ++i) v[static_cast<size_t>(i)] = (src[i] - 0.4) * (src[i] - 0.4);
        const std::vector<double> moved = transfer(src, v, dst, kind);
        for (int i = 0; i + 1 < 9; ++i)
            CHECK(moved[static_cast<size_t>(i)] ==
                  doctest::Approx(0.5 * (v[static_cast<size_t>(i)] + v[static_cast<size_t>(i) + 1]))
                      .epsilon(1e-14));
    }
    SUBCASE("outside nodes take the nearest endpoint value") {
        const Mesh1D dst = build_uniform_mesh(-1.0, 2.0, 7);
        std::vector<double> v(9);
        for (int i = 0; i < 9; ++i) v[static_cast<size_t>(i)] = 1.0 + src[i];
        const std::vector<double> moved = transfer(src, v, dst, kind);
        CHECK(moved.front() == v.front());
        CHECK(moved.back() == v.back());
    }
}

TEST_CASE("transfer through a reference mesh composes two interpolations") {
    const Mesh1D src = build_uniform_mesh(0.0, 1.0, 17);
    const Mesh1D ref = build_uniform_mesh(-0.1, 1.1, 25);
    const Mesh1D dst = build_uniform_mesh(0.05, 0.95, 13);
    std::vector<double> v(17);
    for (int i = 0; i < 17; ++i) v[static_cast<size_t>(i)] = std::cos(2.0 * src[i]);

    for (InterpVariant variant : {InterpVariant::linear, InterpVariant::limited_cubic_hermite}) {
        InterpKind routed{variant, InterpRouting::via_reference, ref};
        InterpKind direct{variant, InterpRouting::direct, std::nullopt};
        const std::vector<double> staged = transfer(src, v, ref, direct);
        const std::vector<double> expected = transfer(ref, staged, dst, direct);
        CHECK(transfer(src, v, dst, routed) == expected);
    }
    InterpKind missing{InterpVariant::linear, InterpRouting::via_reference, std::nullopt};
    CHECK_THROWS_AS(transfer(src, v, dst, missing), std::invalid_argument);
}

TEST_CASE("linear transfer is monotone in its data") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Mesh1D src = build_uniform_mesh(0.0, 1.0, 21);
    const Mesh1D dst = build_uniform_mesh(-0.2, 1.1, 34);
    InterpKind kind;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> low(21), high(21);
        for (int i = 0; i < 21; ++i) {
            low[static_cast<size_t>(i)] = -1.0 + 2.0 * unit(rng);
            high[static_cast<size_t>(i)] = low[static_cast<size_t>(i)] + unit(rng);
        }
        const std::vector<double> a = transfer(src, low, dst, kind);
        const std::vector<double> b = transfer(src, high, dst, kind);
        for (size_t i = 0; i < a.size(); ++i) CHECK(b[i] >= a[i] - 1e-14);
    }
}

TEST_CASE("transfer never increases the max norm") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Mesh1D src = build_uniform_mesh(-1.0, 1.0, 33);
    const Mesh1D dst = build_uniform_mesh(-1.5, 1.4, 41);
    for (InterpVariant variant : {InterpVariant::linear, InterpVariant::limited_cubic_hermite}) {
        InterpKind kind{variant, InterpRouting::direct, std::nullopt};
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> v(33);
            double norm = 0.0;
            for (double& x : v) {
                x = -5.0 + 10.0 * unit(rng);
                norm = std::max(norm, std::fabs(x));
            }
            for (double value : transfer(src, v, dst, kind))
                CHECK(std::fabs(value) <= norm + 1e-12);
        }
    }
}

TEST_CASE("positive interpolation property suite") {
    CHECK(props::interp_boundedness(10000, 20240601));
}
