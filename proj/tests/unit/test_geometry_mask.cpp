#include <doctest.h>

#include <random>

#include "vqloc/error.hpp"
#include "vqloc/geometry.hpp"
#include "vqloc/mask.hpp"

using namespace vqloc;

TEST_SUITE("core-model") {

TEST_CASE("decode_mask examples") {
    const auto all = decode_mask(BinaryMask(2, 2, {0, 4}));
    for (auto c : all.cells) CHECK(c == 1);

    CHECK_THROWS_AS(BinaryMask(2, 2, {4}), MaskError);
    CHECK_THROWS_AS(BinaryMask(2, 2, {1, 2}), MaskError);

    const auto g = decode_mask(BinaryMask(2, 2, {1, 2, 1}));
    CHECK_FALSE(g.at(0, 0));
    CHECK(g.at(1, 0));
    CHECK(g.at(0, 1));
    CHECK_FALSE(g.at(1, 1));
}

TEST_CASE("tight_bbox examples") {
    CHECK(tight_bbox(BinaryMask(4, 4, {0, 16})) == BBox{0, 0, 4, 4});

    MaskGrid single(5, 5);
    single.set(2, 3, true);
    CHECK(tight_bbox(encode_mask(single)) == BBox{2, 3, 1, 1});

    MaskGrid ell(3, 3);
    ell.set(0, 0, true);
    ell.set(0, 1, true);
    ell.set(1, 0, true);
    CHECK(tight_bbox(encode_mask(ell)) == BBox{0, 0, 2, 2});
}

TEST_CASE("box_iou examples and properties") {
    const BBox a{0, 0, 10, 10};
    CHECK(box_iou(a, a) == 1.0);
    CHECK(box_iou(a, BBox{20, 20, 5, 5}) == 0.0);
    CHECK(box_iou(a, BBox{5, 0, 10, 10}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 50);
    for (int i = 0; i < 500; ++i) {
        const BBox p{u(rng), u(rng), u(rng) + 0.1, u(rng) + 0.1};
        const BBox q{u(rng), u(rng), u(rng) + 0.1, u(rng) + 0.1};
        const double iou = box_iou(p, q);
        CHECK(iou == box_iou(q, p));
        CHECK(iou >= 0.0);
        CHECK(iou <= 1.0);
    }
}

TEST_CASE("encode/decode round-trip on random grids") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 17);
        const int h = 1 + static_cast<int>(rng() % 13);
        MaskGrid g(w, h);
        const double p = (rng() % 100) / 100.0;
        for (auto& c : g.cells) c = (rng() % 1000) / 1000.0 < p ? 1 : 0;
        g.cells[rng() % g.cells.size()] = 1;
        const BinaryMask m = encode_mask(g);
        CHECK(decode_mask(m) == g);
        std::uint64_t total = 0;
        for (auto r : m.runs()) total += r;
        CHECK(total == static_cast<std::uint64_t>(w) * h);

        // the tight box covers every pixel and each of its edges touches one
        const BBox b = tight_bbox(m);
        bool left = false, right = false, top = false, bottom = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (!g.at(x, y)) continue;
                CHECK(x >= b.x);
                CHECK(x < b.right());
                CHECK(y >= b.y);
                CHECK(y < b.bottom());
                left |= x == b.x;
                right |= x + 1 == b.right();
                top |= y == b.y;
                bottom |= y + 1 == b.bottom();
            }
        CHECK((left && right && top && bottom));
    }
    MaskGrid empty(3, 3);
    CHECK_THROWS_AS(encode_mask(empty), MaskError);
}

TEST_CASE("from_rect clips to the grid") {
    const auto m = BinaryMask::from_rect(10, 8, -3, 2, 4, 20);
    CHECK(tight_bbox(m) == BBox{0, 2, 4, 6});
    CHECK(m.foreground() == 24);
    CHECK_THROWS_AS(BinaryMask::from_rect(10, 8, 12, 0, 15, 3), MaskError);
}

TEST_CASE("clamp_to_frame") {
    const BBox c = clamp_to_frame({-5, 10, 20, 100}, 50, 40);
    CHECK(c == BBox{0, 10, 15, 30});
    CHECK(c.right() <= 50);
    CHECK(c.bottom() <= 40);
}

}
