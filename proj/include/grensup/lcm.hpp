#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "grensup/stepfn.hpp"

namespace grensup {
namespace detail {

// Sign of a*b - c*d with a correctly signed result (Kahan's fma determinant;
// error < 1.5 ulp of the exact value, so the sign is never wrong and exact
// zeros come out as zero).
inline int det2_sign(double a, double b, double c, double d) {
    const double w = c * d;
    const double e = __builtin_fma(c, d, -w);
    const double f = __builtin_fma(a, b, -w);
    const double det = f - e;
    return (det > 0.0) - (det < 0.0);
}

// slope(p,q) vs slope(q,r) for p.t < q.t < r.t: +1 if decreasing (strictly
// concave turn), 0 if colinear, -1 if increasing.
inline int slope_turn(const Knot& p, const Knot& q, const Knot& r) {
    return det2_sign(q.y - p.y, r.t - q.t, r.y - q.y, q.t - p.t);
}

}  // namespace detail

// Least concave majorant of a finite point set as a vertex list.  Vertices
// are input points with strictly decreasing chord slopes; colinear interior
// points are dropped (canonical minimal representation).
struct ConcaveEnvelope {
    std::vector<Knot> vertices;

    // Piecewise-linear evaluation on [t0, t_last].
    double value(double t) const;

    nlohmann::json to_json() const;
    static ConcaveEnvelope from_json(const nlohmann::json& j);
};

// Upper-hull sweep over points sorted strictly increasing in t; the input
// must contain t=0 and t=1 entries (the knot point set of an upper version).
ConcaveEnvelope least_concave_majorant(std::span<const Knot> points);

// Knot point values of F^+ with t=0 and t=1 entries appended as needed; this
// set determines the majorant of the step function itself.
std::vector<Knot> majorant_points(const CadlagStep& Fplus);

// Left-hand slope process of an envelope: nonincreasing, left-continuous,
// value on (v_{i-1}.t, v_i.t] is the chord slope, f(0) = first slope.
LeftContStep slope_process(const ConcaveEnvelope& env);

// Convenience: Grenander-type estimator from a raw step estimator F_n.
LeftContStep slope_estimator(const CadlagStep& Fn);

}  // namespace grensup
