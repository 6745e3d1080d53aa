#include "raypatch/lift.hpp"
#include "raypatch/scale_lp.hpp"

#include "lp_instances.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <stdexcept>

using namespace raypatch;
using lp_instances::Instance;
using lp_instances::random_feasible_instance;
using lp_instances::reference_solution;

namespace {

BoxFrame unit_frame_at(double z0, double z1) {
    BoxFrame f;
    f.delta_min = Vec3(-1, -1, z0);
    f.delta_max = Vec3(1, 1, z1);
    f.half_extent = Vec3(1, 1, (z1 - z0) / 2);
    return f;
}

PixelSample sample_with(Vec3 dir, double d) {
    PixelSample s;
    s.dir_box = dir;
    s.rel_depth = d;
    return s;
}

AffineDepthParams params_of(double alpha, double beta) {
    AffineDepthParams p;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

}  // namespace

TEST(ScaleLp, TwoSampleAxialExample) {
    const BoxFrame f = unit_frame_at(9, 11);
    std::vector<PixelSample> samples{sample_with({0, 0, 1}, 1.0),
                                     sample_with({0, 0, 1}, 2.0)};
    const auto out = refine_scale_lp(samples, f, params_of(1.0, 0.0));
    EXPECT_NEAR(out.alpha, 2.0, 1e-12);
    EXPECT_NEAR(out.beta, 7.0, 1e-12);
}

TEST(ScaleLp, OffAxisPixelContradictionIsInfeasible) {
    const BoxFrame f = unit_frame_at(9, 11);
    // The x-row forces 2t within [-1, 1]; the z-row needs t within [9, 11].
    std::vector<PixelSample> samples{sample_with({2, 0, 1}, 1.0)};
    EXPECT_THROW(refine_scale_lp(samples, f, params_of(1.0, 0.0)),
                 InfeasibleError);
}

TEST(ScaleLp, SingleDepthValueIsUnbounded) {
    const BoxFrame f = unit_frame_at(9, 11);
    std::vector<PixelSample> samples{sample_with({0, 0, 1}, 1.5)};
    EXPECT_THROW(refine_scale_lp(samples, f, params_of(1.0, 0.0)),
                 UnboundedError);
    samples.push_back(sample_with({0.1, -0.05, 1}, 1.5));
    EXPECT_THROW(refine_scale_lp(samples, f, params_of(1.0, 0.0)),
                 UnboundedError);
}

TEST(ScaleLp, BetaTieBreakStaysNearInit) {
    // alpha* = (15 - 9) / (3 - 1) = 3; the optimum leaves beta a segment
    // [max(9-3, 9-9), min(11-3, 15-9)] = [6, 6] here, and wider below.
    std::vector<DepthConstraint> cons{{1.0, 9.0, 11.0}, {3.0, 9.0, 15.0}};
    const auto res = solve_depth_scale_lp(cons, 0.0);
    ASSERT_EQ(res.status, LpStatus::kOptimal);
    EXPECT_NEAR(res.alpha, 3.0, 1e-12);
    EXPECT_NEAR(res.beta, 6.0, 1e-12);

    // With distinct depths the binding pair pins beta at the optimum; the
    // hint only resolves rounding-width segments.
    std::vector<DepthConstraint> wide{{1.0, 0.0, 100.0}, {2.0, 0.0, 101.0}};
    const auto hinted = solve_depth_scale_lp(wide, -3.5);
    ASSERT_EQ(hinted.status, LpStatus::kOptimal);
    EXPECT_NEAR(hinted.alpha, 101.0, 1e-9);
    EXPECT_NEAR(hinted.beta, -101.0, 1e-9);
}

TEST(ScaleLp, MatchesVertexEnumerationOnRandomFeasibleInstances) {
    SplitMix64 rng(401);
    for (int trial = 0; trial < 200; ++trial) {
        SCOPED_TRACE(trial);
        const Instance inst =
            random_feasible_instance(rng, 2 + static_cast<int>(rng.below(7)));
        const auto oracle = reference_solution(inst);
        ASSERT_EQ(oracle.status, LpStatus::kOptimal);
        const auto out =
            refine_scale_lp(inst.samples, inst.frame, params_of(1.0, 0.0));
        EXPECT_NEAR(out.alpha, oracle.alpha,
                    1e-9 * std::max(1.0, std::abs(oracle.alpha)));
    }
}

TEST(ScaleLp, OutputSatisfiesAllConstraintsWithOneTight) {
    SplitMix64 rng(402);
    for (int trial = 0; trial < 100; ++trial) {
        SCOPED_TRACE(trial);
        const Instance inst = random_feasible_instance(rng, 12);
        const auto out =
            refine_scale_lp(inst.samples, inst.frame, params_of(1.0, 0.0));
        double min_slack = std::numeric_limits<double>::infinity();
        for (const auto& s : inst.samples) {
            const double t = s.rel_depth * out.alpha + out.beta;
            for (int k = 0; k < 3; ++k) {
                const double x = s.dir_box[k] * t;
                const double scale =
                    1.0 + std::abs(x) + std::abs(inst.frame.delta_max[k]);
                EXPECT_GE(x, inst.frame.delta_min[k] - 1e-9 * scale);
                EXPECT_LE(x, inst.frame.delta_max[k] + 1e-9 * scale);
                min_slack = std::min(
                    {min_slack, std::abs(x - inst.frame.delta_min[k]),
                     std::abs(inst.frame.delta_max[k] - x)});
            }
        }
        EXPECT_LT(min_slack, 1e-9 * std::max(1.0, std::abs(out.alpha)))
            << "no active constraint at the optimum";
    }
}

TEST(ScaleLp, AddingSamplesNeverIncreasesAlpha) {
    SplitMix64 rng(405);
    for (int trial = 0; trial < 50; ++trial) {
        Instance inst = random_feasible_instance(rng, 10);
        std::vector<PixelSample> prefix(inst.samples.begin(),
                                        inst.samples.begin() + 4);
        const auto small =
            refine_scale_lp(prefix, inst.frame, params_of(1.0, 0.0));
        const auto full =
            refine_scale_lp(inst.samples, inst.frame, params_of(1.0, 0.0));
        EXPECT_LE(full.alpha, small.alpha + 1e-12);
    }
}

TEST(ScaleLp, LiftedPointsStayInsideTheBox) {
    SplitMix64 rng(406);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_feasible_instance(rng, 40);
        const auto out =
            refine_scale_lp(inst.samples, inst.frame, params_of(1.0, 0.0));
        const auto points = lift_pixels(inst.samples, out, inst.cam);
        for (const auto& p : points) {
            const Vec3 q = inst.frame.rotation * p;
            for (int k = 0; k < 3; ++k) {
                EXPECT_GE(q[k], inst.frame.delta_min[k] - 1e-6);
                EXPECT_LE(q[k], inst.frame.delta_max[k] + 1e-6);
            }
        }
    }
}

TEST(ScaleLp, ClassificationAgreesWithOracleOnIntervalInstances) {
    SplitMix64 rng(407);
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (int trial = 0; trial < 500; ++trial) {
        SCOPED_TRACE(trial);
        const int n = 1 + static_cast<int>(rng.below(10));
        std::vector<DepthConstraint> cons;
        const bool force_equal_d = rng.below(5) == 0;
        const double shared_d = rng.uniform(0.2, 5.0);
        for (int i = 0; i < n; ++i) {
            DepthConstraint c;
            c.d = force_equal_d ? shared_d : rng.uniform(0.2, 5.0);
            // Intervals scattered around a common affine line keep a
            // healthy mix of feasible and infeasible systems.
            const double mid = 2.0 * c.d + 3.0 + rng.uniform(-3.0, 3.0);
            const double half = rng.uniform(0.05, 3.0);
            c.lo = mid - half;
            c.hi = mid + half;
            cons.push_back(c);
        }
        std::vector<oracles::RawConstraint> raw;
        for (const auto& c : cons) {
            raw.push_back({c.d, 1.0, c.hi});
            raw.push_back({-c.d, -1.0, -c.lo});
        }
        const auto oracle = oracles::lp_vertex_oracle(raw, kMinAlpha);
        const auto mine = solve_depth_scale_lp(cons, 0.0);
        ASSERT_EQ(mine.status, oracle.status);
        switch (mine.status) {
            case LpStatus::kOptimal:
                ++optimal;
                EXPECT_NEAR(mine.alpha, oracle.alpha,
                            1e-9 * std::max(1.0, std::abs(oracle.alpha)));
                break;
            case LpStatus::kInfeasible:
                ++infeasible;
                break;
            case LpStatus::kUnbounded:
                ++unbounded;
                break;
        }
    }
    // The generator must actually exercise all three outcomes.
    EXPECT_GT(optimal, 50);
    EXPECT_GT(infeasible, 50);
    EXPECT_GT(unbounded, 10);
}

TEST(ScaleLp, DeterministicAcrossRuns) {
    SplitMix64 rng(403);
    const Instance inst = random_feasible_instance(rng, 30);
    const auto a = refine_scale_lp(inst.samples, inst.frame, params_of(1, 0));
    const auto b = refine_scale_lp(inst.samples, inst.frame, params_of(1, 0));
    EXPECT_EQ(std::memcmp(&a.alpha, &b.alpha, sizeof a.alpha), 0);
    EXPECT_EQ(std::memcmp(&a.beta, &b.beta, sizeof a.beta), 0);
}

namespace {

/// Brute-force oracle for the containment projection: the quadratic
/// optimum lies at the start (when feasible), at one constraint line's
/// metric projection, or at a constraint-pair vertex. Enumerate them all,
/// keep the feasible ones, take the metric minimum.
double projection_oracle(const std::vector<DepthConstraint>& cons,
                         double alpha0, double beta0, double min_alpha,
                         double& best_alpha, double& best_beta) {
    double sd = 0, sdd = 0;
    for (const auto& c : cons) {
        sd += c.d;
        sdd += c.d * c.d;
    }
    const double n = static_cast<double>(cons.size());
    const double lambda = 1e-12 * (1.0 + sdd);
    const double g00 = sdd + lambda, g01 = sd, g11 = n + lambda;

    struct Line {
        double a, b, r;  // a*da + b*db = r (boundary of a*da+b*db <= r)
    };
    std::vector<Line> lines;
    for (const auto& c : cons) {
        const double t0 = c.d * alpha0 + beta0;
        lines.push_back({c.d, 1.0, c.hi - t0});
        lines.push_back({-c.d, -1.0, t0 - c.lo});
    }
    lines.push_back({-1.0, 0.0, alpha0 - min_alpha});

    const auto feasible = [&](double da, double db) {
        for (const auto& l : lines)
            if (l.a * da + l.b * db >
                l.r + 1e-9 * (1 + std::abs(l.r) + std::abs(l.a * da) +
                              std::abs(l.b * db)))
                return false;
        return true;
    };
    const auto metric = [&](double da, double db) {
        return g00 * da * da + 2 * g01 * da * db + g11 * db * db;
    };

    double best = std::numeric_limits<double>::infinity();
    const auto consider = [&](double da, double db) {
        if (!feasible(da, db)) return;
        const double m = metric(da, db);
        if (m < best) {
            best = m;
            best_alpha = alpha0 + da;
            best_beta = beta0 + db;
        }
    };
    consider(0, 0);
    // Metric projection onto each line: x = G^{-1} g * (r / g^T G^{-1} g).
    const double det = g00 * g11 - g01 * g01;
    for (const auto& l : lines) {
        const double ix = (g11 * l.a - g01 * l.b) / det;  // G^{-1} g
        const double iy = (g00 * l.b - g01 * l.a) / det;
        const double denom = l.a * ix + l.b * iy;
        if (std::abs(denom) < 1e-30) continue;
        consider(ix * l.r / denom, iy * l.r / denom);
    }
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const double d2 = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
            const double scale = std::abs(lines[i].a * lines[j].b) +
                                 std::abs(lines[j].a * lines[i].b) + 1e-300;
            if (std::abs(d2) < 1e-12 * scale) continue;
            consider((lines[i].r * lines[j].b - lines[j].r * lines[i].b) / d2,
                     (lines[i].a * lines[j].r - lines[j].a * lines[i].r) / d2);
        }
    return best;
}

}  // namespace

TEST(ProjectIntoBox, FeasibleStartIsUntouched) {
    std::vector<DepthConstraint> cons{{1.0, 5.0, 7.0}, {2.0, 8.0, 12.0}};
    const auto res = project_params_into_box(cons, 2.0, 4.0);  // t = 6, 8
    ASSERT_EQ(res.status, LpStatus::kOptimal);
    EXPECT_DOUBLE_EQ(res.alpha, 2.0);
    EXPECT_DOUBLE_EQ(res.beta, 4.0);
}

TEST(ProjectIntoBox, MatchesCandidateEnumerationOracle) {
    SplitMix64 rng(409);
    int repaired = 0;
    for (int trial = 0; trial < 300; ++trial) {
        SCOPED_TRACE(trial);
        const int n = 1 + static_cast<int>(rng.below(6));
        std::vector<DepthConstraint> cons;
        for (int i = 0; i < n; ++i) {
            DepthConstraint c;
            c.d = rng.uniform(0.2, 5.0);
            const double mid = 2.0 * c.d + 3.0 + rng.uniform(-1.0, 1.0);
            const double half = rng.uniform(0.2, 2.0);
            c.lo = mid - half;
            c.hi = mid + half;
            cons.push_back(c);
        }
        const double alpha0 = rng.uniform(0.5, 4.0);
        const double beta0 = rng.uniform(0.0, 6.0);
        const auto res = project_params_into_box(cons, alpha0, beta0);
        double oa = 0, ob = 0;
        const double best =
            projection_oracle(cons, alpha0, beta0, kMinAlpha, oa, ob);
        if (!std::isfinite(best)) {
            EXPECT_EQ(res.status, LpStatus::kInfeasible);
            continue;
        }
        ASSERT_EQ(res.status, LpStatus::kOptimal);
        // Clustered d values leave the metric nearly flat along a line, so
        // compare displacement costs, not coordinates.
        double sd = 0, sdd = 0;
        for (const auto& c : cons) {
            sd += c.d;
            sdd += c.d * c.d;
        }
        const double lambda = 1e-12 * (1.0 + sdd);
        const double da = res.alpha - alpha0, db = res.beta - beta0;
        const double mine_cost = (sdd + lambda) * da * da + 2 * sd * da * db +
                                 (cons.size() + lambda) * db * db;
        EXPECT_LE(mine_cost, best * (1 + 1e-6) + 1e-9);
        if (res.alpha != alpha0 || res.beta != beta0) ++repaired;
        // The result satisfies every constraint.
        for (const auto& c : cons) {
            const double t = c.d * res.alpha + res.beta;
            EXPECT_GE(t, c.lo - 1e-8);
            EXPECT_LE(t, c.hi + 1e-8);
        }
    }
    EXPECT_GT(repaired, 50);
}
