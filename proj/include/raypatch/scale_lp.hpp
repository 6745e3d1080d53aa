#pragma once

#include "raypatch/box.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/math.hpp"
#include "raypatch/ransac.hpp"
#include "raypatch/sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace raypatch {

/// alpha > 0 realized as alpha >= this, so the feasible set is closed.
inline constexpr double kMinAlpha = 1e-9;

/// Box containment of one pixel reduced to an interval on its depth:
/// lo <= d * alpha + beta <= hi.
struct DepthConstraint {
    double d = 0;  // relative depth of the pixel
    double lo = 0;
    double hi = 0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct ScaleLpResult {
    LpStatus status = LpStatus::kInfeasible;
    double alpha = 0;
    double beta = 0;
};

/// Collapses delta_min <= X*(d*alpha+beta) <= delta_max over the three
/// axes into one interval on t = d*alpha + beta. Returns false when the
/// pixel's viewing ray cannot meet the box for any t.
inline bool depth_interval_for_sample(const PixelSample& s,
                                      const BoxFrame& frame, double& lo,
                                      double& hi) {
    lo = -std::numeric_limits<double>::infinity();
    hi = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double x = s.dir_box[k];
        const double mn = frame.delta_min[k];
        const double mx = frame.delta_max[k];
        if (x == 0.0) {
            if (mn > 0.0 || mx < 0.0) return false;
            continue;
        }
        const double b1 = mn / x;
        const double b2 = mx / x;
        lo = std::max(lo, std::min(b1, b2));
        hi = std::min(hi, std::max(b1, b2));
    }
    return lo <= hi;
}

namespace detail {

/// Half-plane a*alpha + b*beta <= c.
struct HalfPlane {
    double a = 0, b = 0, c = 0;
    bool holds(double alpha, double beta) const {
        return a * alpha + b * beta <= c;
    }
};

/// Randomized incremental 2-variable LP: maximize alpha subject to the
/// depth-interval constraints and alpha >= min_alpha. The d values must not
/// all be equal (that case is unbounded and handled by the caller).
inline ScaleLpResult seidel_max_alpha(const std::vector<DepthConstraint>& cons,
                                      double min_alpha) {
    // Bounding pair: the lower line at the smallest d and the upper line at
    // the largest d cap alpha along every direction, so the incremental
    // pass always starts from a bounded optimum.
    std::size_t i_min = 0, i_max = 0;
    for (std::size_t i = 1; i < cons.size(); ++i) {
        if (cons[i].d < cons[i_min].d) i_min = i;
        if (cons[i].d > cons[i_max].d) i_max = i;
    }
    const double d0 = cons[i_min].d, r0 = cons[i_min].lo;  // beta >= r0 - d0*a
    const double d1 = cons[i_max].d, r1 = cons[i_max].hi;  // beta <= r1 - d1*a
    double alpha = (r1 - r0) / (d1 - d0);
    if (alpha < min_alpha) return {LpStatus::kInfeasible, 0, 0};
    double beta = r1 - d1 * alpha;

    std::vector<HalfPlane> seen;
    seen.reserve(2 * cons.size() + 1);
    seen.push_back({-1.0, 0.0, -min_alpha});
    seen.push_back({-d0, -1.0, -r0});
    seen.push_back({d1, 1.0, r1});

    std::vector<HalfPlane> rest;
    rest.reserve(2 * cons.size());
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (i != i_max) rest.push_back({cons[i].d, 1.0, cons[i].hi});
        if (i != i_min) rest.push_back({-cons[i].d, -1.0, -cons[i].lo});
    }
    // Deterministic shuffle: the expected-linear behaviour needs a random
    // order, the bit-identical-output contract needs a fixed one.
    SplitMix64 rng(0x5eed0f2a11ce5a1eULL);
    for (std::size_t i = rest.size(); i > 1; --i)
        std::swap(rest[i - 1], rest[rng.below(i)]);

    for (const HalfPlane& h : rest) {
        if (h.holds(alpha, beta)) {
            seen.push_back(h);
            continue;
        }
        // Optimum moves onto the line a*alpha + b*beta = c. Our constraint
        // lines always have b = +-1.
        double a_lo = -std::numeric_limits<double>::infinity();
        double a_hi = std::numeric_limits<double>::infinity();
        for (const HalfPlane& p : seen) {
            const double coeff = p.a - p.b * h.a / h.b;
            const double rhs = p.c - p.b * h.c / h.b;
            if (coeff > 0.0)
                a_hi = std::min(a_hi, rhs / coeff);
            else if (coeff < 0.0)
                a_lo = std::max(a_lo, rhs / coeff);
            else if (rhs < 0.0)
                return {LpStatus::kInfeasible, 0, 0};
        }
        if (a_lo > a_hi || !std::isfinite(a_hi))
            return {LpStatus::kInfeasible, 0, 0};
        alpha = a_hi;
        beta = (h.c - h.a * alpha) / h.b;
        seen.push_back(h);
    }
    return {LpStatus::kOptimal, alpha, beta};
}

}  // namespace detail

/// Solves max alpha s.t. lo_i <= d_i*alpha + beta <= hi_i and
/// alpha >= min_alpha. Among optimal beta (the optimum can be a segment)
/// returns the one nearest beta_hint.
inline ScaleLpResult solve_depth_scale_lp(
    const std::vector<DepthConstraint>& cons, double beta_hint,
    double min_alpha = kMinAlpha) {
    for (const auto& c : cons)
        if (c.lo > c.hi) return {LpStatus::kInfeasible, 0, 0};
    if (cons.empty()) return {LpStatus::kUnbounded, 0, 0};

    bool all_equal = true;
    for (const auto& c : cons)
        if (c.d != cons[0].d) {
            all_equal = false;
            break;
        }
    if (all_equal) {
        // Every constraint line is parallel: beta absorbs any alpha, so the
        // problem is unbounded whenever the intervals intersect at all.
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (const auto& c : cons) {
            lo = std::max(lo, c.lo);
            hi = std::min(hi, c.hi);
        }
        return {lo <= hi ? LpStatus::kUnbounded : LpStatus::kInfeasible, 0, 0};
    }

    ScaleLpResult res = detail::seidel_max_alpha(cons, min_alpha);
    if (res.status != LpStatus::kOptimal) return res;

    // The optimal beta can be a segment; pick the feasible beta nearest the
    // hint.
    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    for (const auto& c : cons) {
        b_lo = std::max(b_lo, c.lo - c.d * res.alpha);
        b_hi = std::min(b_hi, c.hi - c.d * res.alpha);
    }
    if (b_lo <= b_hi)
        res.beta = std::clamp(beta_hint, b_lo, b_hi);
    else
        res.beta = 0.5 * (b_lo + b_hi);  // rounding left no width
    return res;
}

/// Minimal-displacement containment repair: finds the (alpha, beta)
/// satisfying every depth constraint that minimizes the mean-square depth
/// movement sum_i (d_i*d_alpha + d_beta)^2 away from (alpha0, beta0).
/// Randomized incremental over half-planes in whitened coordinates; the
/// projection is unique, so the result is order-independent.
inline ScaleLpResult project_params_into_box(
    const std::vector<DepthConstraint>& cons, double alpha0, double beta0,
    double min_alpha = kMinAlpha) {
    for (const auto& c : cons)
        if (c.lo > c.hi) return {LpStatus::kInfeasible, 0, 0};

    // Gram matrix of the displacement metric; a hair of regularization
    // keeps it positive definite when the d values cluster.
    double sd = 0, sdd = 0;
    for (const auto& c : cons) {
        sd += c.d;
        sdd += c.d * c.d;
    }
    const double n = static_cast<double>(cons.size());
    const double lambda = 1e-12 * (1.0 + sdd);
    // G = [[sdd, sd], [sd, n]] + lambda*I = L * L^T.
    const double g00 = sdd + lambda, g01 = sd, g11 = n + lambda;
    const double l00 = std::sqrt(g00);
    const double l10 = g01 / l00;
    const double l11 = std::sqrt(std::max(g11 - l10 * l10, lambda));

    // Half-planes on x = (d_alpha, d_beta): g^T x <= r. In whitened
    // coordinates y = L^T x they become h^T y <= r with h = L^{-1} g.
    struct Plane {
        double hx, hy, r;
    };
    std::vector<Plane> planes;
    planes.reserve(2 * cons.size() + 1);
    auto add_plane = [&](double ga, double gb, double r) {
        const double hx = ga / l00;
        const double hy = (gb - l10 * hx) / l11;
        planes.push_back({hx, hy, r});
    };
    for (const auto& c : cons) {
        const double t0 = c.d * alpha0 + beta0;
        add_plane(c.d, 1.0, c.hi - t0);    //  d*da + db <= hi - t0
        add_plane(-c.d, -1.0, t0 - c.lo);  // -(d*da + db) <= t0 - lo
    }
    add_plane(-1.0, 0.0, alpha0 - min_alpha);  // alpha0 + da >= min_alpha

    SplitMix64 rng(0x9a07ec7105eedULL);
    for (std::size_t i = planes.size(); i > 1; --i)
        std::swap(planes[i - 1], planes[rng.below(i)]);

    double yx = 0, yy = 0;  // the unconstrained optimum: no displacement
    std::vector<Plane> seen;
    seen.reserve(planes.size());
    for (const Plane& p : planes) {
        if (p.hx * yx + p.hy * yy <= p.r) {
            seen.push_back(p);
            continue;
        }
        // Projection onto p's boundary line, clamped by the seen set.
        const double hn2 = p.hx * p.hx + p.hy * p.hy;
        if (hn2 == 0.0) return {LpStatus::kInfeasible, 0, 0};
        const double cx = p.r * p.hx / hn2;  // closest point on the line
        const double cy = p.r * p.hy / hn2;
        const double ux = -p.hy / std::sqrt(hn2);  // along the line
        const double uy = p.hx / std::sqrt(hn2);
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (const Plane& q : seen) {
            const double coeff = q.hx * ux + q.hy * uy;
            const double rhs = q.r - (q.hx * cx + q.hy * cy);
            if (coeff > 0.0)
                hi = std::min(hi, rhs / coeff);
            else if (coeff < 0.0)
                lo = std::max(lo, rhs / coeff);
            else if (rhs < 0.0)
                return {LpStatus::kInfeasible, 0, 0};
        }
        if (lo > hi) return {LpStatus::kInfeasible, 0, 0};
        const double tau = std::clamp(0.0, lo, hi);
        yx = cx + tau * ux;
        yy = cy + tau * uy;
        seen.push_back(p);
    }

    // Back to parameter space: x = L^{-T} y.
    const double db = yy / l11;
    const double da = (yx - l10 * db) / l00;
    return {LpStatus::kOptimal, alpha0 + da, beta0 + db};
}

/// Max-scale refinement: maximizes the depth scale subject to every sample
/// staying inside the box. `init` must come from a successful affine fit;
/// it seeds the beta tie-break and its inlier statistics are carried over.
/// Per-sample box containment reduced to depth intervals. Throws
/// InfeasibleError (naming the sample) when a pixel's ray misses the box.
inline std::vector<DepthConstraint> depth_constraints(
    const std::vector<PixelSample>& samples, const BoxFrame& frame) {
    std::vector<DepthConstraint> cons;
    cons.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        DepthConstraint c;
        c.d = samples[i].rel_depth;
        if (!depth_interval_for_sample(samples[i], frame, c.lo, c.hi))
            throw InfeasibleError("scale lp: sample " + std::to_string(i) +
                                  " cannot meet the box on its ray");
        cons.push_back(c);
    }
    return cons;
}

inline AffineDepthParams refine_scale_lp(const std::vector<PixelSample>& samples,
                                         const BoxFrame& frame,
                                         const AffineDepthParams& init,
                                         double min_alpha = kMinAlpha) {
    if (samples.empty())
        throw ValidationError("scale lp: need at least one sample");
    if (!(init.alpha > 0))
        throw ValidationError("scale lp: init.alpha must be > 0");

    const std::vector<DepthConstraint> cons = depth_constraints(samples, frame);
    const ScaleLpResult res = solve_depth_scale_lp(cons, init.beta, min_alpha);
    switch (res.status) {
        case LpStatus::kInfeasible:
            throw InfeasibleError("scale lp: no (alpha, beta) fits the box");
        case LpStatus::kUnbounded:
            throw UnboundedError(
                "scale lp: alpha has no finite maximum (all relative depths "
                "equal)");
        case LpStatus::kOptimal:
            break;
    }
    AffineDepthParams out = init;
    out.alpha = res.alpha;
    out.beta = res.beta;
    return out;
}

}  // namespace raypatch
