#pragma once

#include <cstdint>
#include <functional>

#include <json.hpp>

#include "grensup/models.hpp"
#include "grensup/stepfn.hpp"

namespace grensup {

// Jump points tau_1 < ... < tau_{N-1} of a slope process together with the
// flat-part values gamma_1 > ... > gamma_N; tau_0 = 0 and tau_N = 1 are
// implicit.  gamma_i = fhat(tau_i) and tau_i = Uhat(gamma_i) (switch
// relations), with tau_N = 1 carried by the boundary convention.
struct JumpStructure {
    std::vector<double> tau;    // interior jump points, size n_flat - 1
    std::vector<double> gamma;  // flat-part values, size n_flat, strictly decreasing
    std::int64_t n_flat = 0;

    nlohmann::json to_json() const;
};

// Generalized inverse Uhat(a) = sup{t in [0,1]: fhat(t) >= a} of a
// nonincreasing slope process, materialized as a left-continuous step
// function of the level a (value 1 below all slopes, 0 above all slopes).
LeftContStep inverse_estimator(const LeftContStep& fhat);

// Recovers the slope process from its inverse; exact at continuity points.
LeftContStep inverse_of_inverse(const LeftContStep& Uhat);

// Greatest maximizer over [0,1] of F^+(t) - a t, located by scanning knots
// and both one-sided limits with an exactly signed comparison.
double argmax_characterization(const CadlagStep& Fplus, double a);

// Extracts and validates the jump structure; a violated switch identity
// throws std::logic_error (it would signal a majorant bug).
JumpStructure jump_structure(const LeftContStep& fhat);

// max_i |tau_i - tau_{i-1}| including the boundary segments.
double max_spacing(const JumpStructure& js);

// Exact sup over [a_lo, a_hi] of |Uhat(a) - g(a)| for continuous monotone g.
double sup_inverse_distance(const LeftContStep& Uhat, const std::function<double(double)>& g,
                            double a_lo, double a_hi);
double sup_inverse_distance(const LeftContStep& Uhat, const MonotoneModel& model, double a_lo,
                            double a_hi);
// Sup over the whole real line; reduces to [f(1), f(0)] since g is constant
// and Uhat monotone outside that range.
double sup_inverse_distance_all(const LeftContStep& Uhat, const MonotoneModel& model);

}  // namespace grensup
