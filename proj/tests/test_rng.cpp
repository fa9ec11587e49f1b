#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "fbd/rng.hpp"

using fbd::Philox;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using B = std::array<std::uint32_t, 4>;
    CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        seen.insert(va);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 300);
}

TEST_CASE("uniform draws lie in the open unit interval with the right moments") {
    Philox r(1, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
        s2 += u * u;
    }
    CHECK(std::abs(s / n - 0.5) < 3 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(s2 / n - 1.0 / 3) < 3 * std::sqrt(4.0 / 45 / n));
}

TEST_CASE("exponential draws have unit mean") {
    Philox r(5, 11);
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.exponential();
    CHECK(std::abs(s / n - 1.0) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("works as a UniformRandomBitGenerator") {
    Philox r(0, 0);
    std::array<int, 5> v{1, 2, 3, 4, 5};
    std::shuffle(v.begin(), v.end(), r);
    std::sort(v.begin(), v.end());
    CHECK(v == std::array<int, 5>{1, 2, 3, 4, 5});
}
