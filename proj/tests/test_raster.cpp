#include "raypatch/raster.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace raypatch;
using test_util::make_camera;

namespace {

ObjectMask symmetric_box_mask(double enlarge) {
    const Camera cam = make_camera();
    BBox3D box{{0, 0, 10}, {2, 2, 2}, 0, 0};
    return roi_mask_from_box(cam, box, enlarge);
}

}  // namespace

TEST(RoiMask, CenteredBoxGivesSymmetricMask) {
    const ObjectMask mask = symmetric_box_mask(0.0);
    ASSERT_GT(mask.count(), 0u);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            EXPECT_EQ(mask.at(x, y), mask.at(mask.width - 1 - x, y));
            EXPECT_EQ(mask.at(x, y), mask.at(x, mask.height - 1 - y));
        }
}

TEST(RoiMask, EnlargementIsMonotone) {
    const ObjectMask base = symmetric_box_mask(0.0);
    const ObjectMask larger = symmetric_box_mask(0.10);
    EXPECT_GT(larger.count(), base.count());
    for (int y = 0; y < base.height; ++y)
        for (int x = 0; x < base.width; ++x)
            if (base.at(x, y)) {
                EXPECT_TRUE(larger.at(x, y));
            }
}

TEST(RoiMask, ContainsProjectedCornersAndMatchesHalfPlaneOracle) {
    SplitMix64 rng(101);
    int corner_checks = 0;
    for (int i = 0; i < 1000; ++i) {
        const Camera cam = test_util::random_camera(rng);
        const BBox3D box = test_util::random_visible_box(rng, cam);
        const double enlarge = (i % 2) ? 0.10 : 0.0;
        ObjectMask mask;
        try {
            mask = roi_mask_from_box(cam, box, enlarge);
        } catch (const EmptyMaskError&) {
            continue;  // sub-pixel hull
        }
        const auto pts = project_box_corners(cam, box);
        if (enlarge > 0) {
            // Corner-pixel containment: the enlargement pushes a hull
            // vertex past its own pixel's center once the shift
            // (enlarge * centroid distance) clears the pixel diagonal.
            std::vector<Vec2> raw;
            for (const auto& p : pts) raw.emplace_back(p.u, p.v);
            const Vec2 centroid = polygon_centroid(convex_hull(raw));
            for (const auto& p : pts) {
                if ((Vec2(p.u, p.v) - centroid).norm() * enlarge < 2.5)
                    continue;
                const int px = static_cast<int>(std::floor(p.u));
                const int py = static_cast<int>(std::floor(p.v));
                if (px >= 0 && px < cam.width && py >= 0 && py < cam.height) {
                    EXPECT_TRUE(mask.at(px, py))
                        << "corner pixel (" << px << "," << py
                        << ") not in mask";
                    ++corner_checks;
                }
            }
        }

        // Reconstruct the enlarged hull and compare against the per-pixel
        // half-plane rasterizer.
        std::vector<Vec2> corners2d;
        for (const auto& p : pts) corners2d.emplace_back(p.u, p.v);
        std::vector<Vec2> hull = convex_hull(corners2d);
        if (enlarge > 0) {
            const Vec2 c = polygon_centroid(hull);
            for (auto& p : hull) p = c + (1.0 + enlarge) * (p - c);
        }
        const ObjectMask oracle =
            oracles::halfplane_fill(hull, cam.width, cam.height);
        ASSERT_EQ(mask.count(), oracle.count());
        EXPECT_EQ(mask.bits, oracle.bits);
    }
    EXPECT_GT(corner_checks, 100);  // the containment check must fire
}

TEST(RoiMask, DegenerateHullThrowsEmptyMask) {
    const Camera cam = make_camera();
    BBox3D tiny{{0, 0, 60}, {0.05, 0.05, 0.05}, 0, 0};
    EXPECT_THROW(roi_mask_from_box(cam, tiny, 0.0), EmptyMaskError);
}

TEST(SquareCrop, UsesMaxDimensionAndTargetScale) {
    ObjectMask mask(512, 512);
    for (int y = 10; y < 70; ++y)
        for (int x = 10; x < 110; ++x) mask.set(x, y);
    const SquareCrop crop = square_crop_for_mask(mask, 512);
    EXPECT_EQ(crop.side, 100);
    EXPECT_DOUBLE_EQ(crop.scale, 5.12);
    EXPECT_LE(crop.x0, 10);
    EXPECT_GE(crop.x0 + crop.side, 110);
    EXPECT_LE(crop.y0, 10);
    EXPECT_GE(crop.y0 + crop.side, 70);
}

TEST(SquareCrop, ClampsAtImageEdgeYetEncloses) {
    ObjectMask mask(512, 512);
    for (int y = 0; y < 30; ++y)
        for (int x = 452; x < 512; ++x) mask.set(x, y);
    const SquareCrop crop = square_crop_for_mask(mask, 512);
    EXPECT_EQ(crop.side, 60);
    EXPECT_GE(crop.x0, 0);
    EXPECT_LE(crop.x0 + crop.side, 512);
    EXPECT_LE(crop.x0, 452);
    EXPECT_GE(crop.x0 + crop.side, 512);
    EXPECT_EQ(crop.y0, 0);
}

TEST(SquareCrop, RoundTripWithinHalfPixel) {
    SplitMix64 rng(103);
    for (int i = 0; i < 300; ++i) {
        ObjectMask mask(256, 192);
        const int x0 = static_cast<int>(rng.below(200));
        const int y0 = static_cast<int>(rng.below(150));
        const int w = 1 + static_cast<int>(rng.below(56));
        const int h = 1 + static_cast<int>(rng.below(42));
        for (int y = y0; y < std::min(192, y0 + h); ++y)
            for (int x = x0; x < std::min(256, x0 + w); ++x) mask.set(x, y);
        const SquareCrop crop = square_crop_for_mask(mask, 512);
        for (int k = 0; k < 10; ++k) {
            const Vec2 full(rng.uniform(0, 256), rng.uniform(0, 192));
            const Vec2 back = crop.to_full(crop.to_crop(full));
            EXPECT_NEAR(back.x(), full.x(), 0.5);
            EXPECT_NEAR(back.y(), full.y(), 0.5);
        }
    }
}

TEST(SquareCrop, EmptyMaskThrows) {
    ObjectMask mask(64, 64);
    EXPECT_THROW(square_crop_for_mask(mask, 512), EmptyMaskError);
}

TEST(ConvexHull, DropsInteriorAndCollinearPoints) {
    std::vector<Vec2> pts{{0, 0}, {4, 0}, {4, 4}, {0, 4},
                          {2, 2}, {2, 0}, {4, 2}};
    const auto hull = convex_hull(pts);
    EXPECT_EQ(hull.size(), 4u);
    EXPECT_DOUBLE_EQ(polygon_area(hull), 16.0);
    const Vec2 c = polygon_centroid(hull);
    EXPECT_NEAR(c.x(), 2.0, 1e-12);
    EXPECT_NEAR(c.y(), 2.0, 1e-12);
}
