#include "raypatch/correspond.hpp"
#include "raypatch/depth.hpp"
#include "raypatch/lift.hpp"
#include "raypatch/ransac.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstring>

using namespace raypatch;
using test_util::make_camera;

namespace {

ObjectMask full_mask(int w, int h) {
    ObjectMask m(w, h);
    for (auto& b : m.bits) b = 1;
    return m;
}

}  // namespace

TEST(GradientFilter, ConstantDepthKeepsMask) {
    DepthMap depth(16, 12, 3.5f);
    const ObjectMask mask = full_mask(16, 12);
    const ObjectMask out = depth_gradient_filter(depth, mask, 0.01);
    EXPECT_EQ(out.bits, mask.bits);
}

TEST(GradientFilter, StepEdgeRemovesAdjacentColumns) {
    const double thr = 0.1;
    const int edge = 8;  // first column of the high plateau
    DepthMap depth(16, 12, 0.f);
    for (int y = 0; y < 12; ++y)
        for (int x = edge; x < 16; ++x)
            depth.at(x, y) = static_cast<float>(10.0 * thr);
    const ObjectMask out =
        depth_gradient_filter(depth, full_mask(16, 12), thr);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) {
            const bool adjacent = (x == edge - 1 || x == edge);
            EXPECT_EQ(out.at(x, y), !adjacent) << "x=" << x << " y=" << y;
        }
}

TEST(GradientFilter, MatchesIndependentGradientOracle) {
    SplitMix64 rng(301);
    for (int trial = 0; trial < 50; ++trial) {
        DepthMap depth(24, 18);
        for (auto& v : depth.values)
            v = static_cast<float>(rng.uniform(0, 4));
        ObjectMask mask(24, 18);
        for (auto& b : mask.bits) b = rng.below(3) != 0;
        const double thr = rng.uniform(0.2, 2.0);
        const ObjectMask out = depth_gradient_filter(depth, mask, thr);
        for (int y = 0; y < 18; ++y)
            for (int x = 0; x < 24; ++x) {
                const bool expect =
                    mask.at(x, y) && oracles::gradient_at(depth, x, y) <= thr;
                EXPECT_EQ(out.at(x, y), expect);
            }
    }
}

TEST(GradientFilter, RejectsShapeMismatch) {
    DepthMap depth(8, 8, 1.f);
    ObjectMask mask(8, 9);
    EXPECT_THROW(depth_gradient_filter(depth, mask, 0.1),
                 DimensionMismatchError);
}

TEST(Correspondences, AffineSceneIsRecoveredExactly) {
    const Camera cam = make_camera();
    DepthMap depth(cam.width, cam.height, 0.f);
    ObjectMask mask(cam.width, cam.height);
    LidarScan scan;
    SplitMix64 rng(303);
    // Relative depth is exactly (z - 3) / 2 at every pixel a ray hits; one
    // ray per pixel.
    for (int k = 0; k < 500; ++k) {
        const int px = 4 + (k % 100);
        const int py = 4 + (k / 100) * 19;
        const float d = 0.25f * static_cast<float>(1 + rng.below(40));
        const double z = 2.0 * d + 3.0;
        depth.at(px, py) = d;
        LidarRay ray;
        ray.origin = Vec3::Zero();
        const Vec3 p = cam.backproject(px + 0.5, py + 0.5, z);
        ray.direction = p.normalized();
        ray.range = static_cast<float>(p.norm());
        scan.rays.push_back(ray);
    }
    const auto pairs = background_correspondences(scan, cam, depth, mask);
    ASSERT_EQ(pairs.size(), scan.rays.size());
    for (const auto& c : pairs)
        EXPECT_NEAR(c.metric_depth, 2.0 * c.rel_depth + 3.0, 1e-5);
}

TEST(Correspondences, MaskedPixelsAreExcluded) {
    const Camera cam = make_camera();
    DepthMap depth(cam.width, cam.height, 1.f);
    ObjectMask mask(cam.width, cam.height);
    LidarScan scan;
    for (int i = 0; i < 10; ++i) {
        LidarRay ray;
        ray.origin = Vec3::Zero();
        const Vec3 p = cam.backproject(10.5 + i, 20.5, 8.0);
        ray.direction = p.normalized();
        ray.range = static_cast<float>(p.norm());
        scan.rays.push_back(ray);
    }
    for (int i = 0; i < 4; ++i) mask.set(10 + i, 20);  // mask out four
    const auto pairs = background_correspondences(scan, cam, depth, mask);
    EXPECT_EQ(pairs.size(), 6u);
}

TEST(Correspondences, TooFewPairsThrows) {
    const Camera cam = make_camera();
    DepthMap depth(cam.width, cam.height, 1.f);
    ObjectMask mask(cam.width, cam.height);
    LidarScan scan;  // nothing projects into the raster
    LidarRay behind;
    behind.origin = Vec3::Zero();
    behind.direction = Vec3(0, 0, -1);
    behind.range = 5;
    scan.rays.push_back(behind);
    EXPECT_THROW(background_correspondences(scan, cam, depth, mask),
                 TooFewCorrespondencesError);
}

TEST(Ransac, NoiselessDataRecoversExactly) {
    SplitMix64 rng(305);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Correspondence> pairs;
        const std::size_t n = 2 + rng.below(100);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = rng.uniform(0.5, 8.0);
            pairs.push_back({d, 2.0 * d + 3.0});
        }
        pairs[0].rel_depth = 0.5;  // ensure two distinct depths
        pairs[0].metric_depth = 4.0;
        pairs[1].rel_depth = 6.0;
        pairs[1].metric_depth = 15.0;
        const auto fit = ransac_affine_fit(pairs, 0.05, 200, trial);
        EXPECT_NEAR(fit.alpha, 2.0, 1e-9);
        EXPECT_NEAR(fit.beta, 3.0, 1e-9);
        EXPECT_EQ(fit.inlier_count, pairs.size());
        EXPECT_LT(fit.residual_rms, 1e-9);
    }
}

TEST(Ransac, RobustToOutliers) {
    SplitMix64 rng(307);
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 70; ++i) {
        const double d = rng.uniform(0.5, 10.0);
        pairs.push_back({d, 2.0 * d + 3.0});
    }
    for (int i = 0; i < 30; ++i)
        pairs.push_back({rng.uniform(0.5, 10.0), rng.uniform(0.0, 40.0)});
    const auto fit = ransac_affine_fit(pairs, 0.05, 1000, 99);
    EXPECT_NEAR(fit.alpha, 2.0, 2e-3);
    EXPECT_GE(fit.inlier_count, 70u);
}

TEST(Ransac, DegenerateDepthsThrow) {
    std::vector<Correspondence> pairs{{1.5, 4.0}, {1.5, 5.0}, {1.5, 6.0}};
    EXPECT_THROW(ransac_affine_fit(pairs, 0.05, 100, 1), DegenerateFitError);
}

TEST(Ransac, NegativeScaleDataThrows) {
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 10; ++i)
        pairs.push_back({static_cast<double>(i), 20.0 - 1.5 * i});
    EXPECT_THROW(ransac_affine_fit(pairs, 0.05, 100, 1), NoPositiveScaleError);
}

TEST(Ransac, DeterministicForFixedSeed) {
    SplitMix64 rng(309);
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 50; ++i) {
        const double d = rng.uniform(0.5, 10.0);
        pairs.push_back({d, 1.7 * d + 0.4 + rng.gaussian() * 0.02});
    }
    const auto a = ransac_affine_fit(pairs, 0.05, 500, 1234);
    const auto b = ransac_affine_fit(pairs, 0.05, 500, 1234);
    EXPECT_EQ(std::memcmp(&a.alpha, &b.alpha, sizeof a.alpha), 0);
    EXPECT_EQ(std::memcmp(&a.beta, &b.beta, sizeof a.beta), 0);
    EXPECT_EQ(a.inlier_count, b.inlier_count);
    EXPECT_EQ(std::memcmp(&a.residual_rms, &b.residual_rms,
                          sizeof a.residual_rms),
              0);
}

TEST(Lift, PrincipalPixelLiftsToAxis) {
    const Camera cam = make_camera();
    std::vector<PixelSample> samples(1);
    samples[0].u = 64;
    samples[0].v = 64;
    samples[0].rel_depth = 2.0;
    AffineDepthParams params;
    params.alpha = 3.0;
    params.beta = 4.0;  // depth = 10
    const auto pts = lift_pixels(samples, params, cam);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_TRUE(pts[0].isApprox(Vec3(0, 0, 10), 1e-12));
}

TEST(Lift, IdentityIntrinsicsGiveHomogeneousScaling) {
    Camera cam;
    cam.fx = cam.fy = 1;
    cam.cx = cam.cy = 0;
    cam.width = cam.height = 4;
    AffineDepthParams params;
    params.alpha = 1.0;
    params.beta = 0.0;
    std::vector<PixelSample> samples(1);
    samples[0].u = 2.0;
    samples[0].v = 3.0;
    samples[0].rel_depth = 5.0;
    const auto pts = lift_pixels(samples, params, cam);
    EXPECT_TRUE(pts[0].isApprox(Vec3(10, 15, 5), 1e-12));
}

TEST(Lift, RoundTripsThroughProjection) {
    SplitMix64 rng(311);
    for (int trial = 0; trial < 100; ++trial) {
        const Camera cam = test_util::random_camera(rng);
        AffineDepthParams params;
        params.alpha = rng.uniform(0.5, 4.0);
        params.beta = rng.uniform(0.0, 2.0);
        std::vector<PixelSample> samples;
        for (int i = 0; i < 20; ++i) {
            PixelSample s;
            s.u = rng.uniform(0, cam.width);
            s.v = rng.uniform(0, cam.height);
            s.rel_depth = rng.uniform(1.0, 10.0);
            samples.push_back(s);
        }
        const auto pts = lift_pixels(samples, params, cam);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto p = project_point(cam, cam.to_world(pts[i]));
            EXPECT_NEAR(p.u, samples[i].u, 1e-6);
            EXPECT_NEAR(p.v, samples[i].v, 1e-6);
        }
    }
}

TEST(Lift, NonPositiveDepthNamesThePixel) {
    const Camera cam = make_camera();
    std::vector<PixelSample> samples(3);
    samples[2].rel_depth = -5.0;
    AffineDepthParams params;
    params.alpha = 1.0;
    params.beta = 2.0;
    try {
        lift_pixels(samples, params, cam);
        FAIL() << "expected NonPositiveDepthError";
    } catch (const NonPositiveDepthError& e) {
        EXPECT_NE(std::string(e.what()).find("pixel 2"), std::string::npos);
    }
}
