#include "grensup/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grensup/lcm.hpp"

namespace grensup {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

nlohmann::json JumpStructure::to_json() const {
    return {{"tau", tau}, {"gamma", gamma}, {"n_flat", n_flat}};
}

LeftContStep inverse_estimator(const LeftContStep& fhat) {
    if (!fhat.is_nonincreasing())
        throw std::domain_error("inverse_estimator: input must be nonincreasing");
    const LeftContStep h = fhat.merged();
    const auto& w = h.bounds();   // w_1 < ... < w_k, w_k = right end of domain
    const auto& s = h.values();   // s_1 > ... > s_k
    const std::size_t k = s.size();
    // pieces of Uhat over levels a: (-inf, s_k] -> w_k, (s_{i+1}, s_i] -> w_i,
    // (s_1, inf) -> 0
    std::vector<double> bounds(k), values(k);
    for (std::size_t j = 0; j < k; ++j) {
        bounds[j] = s[k - 1 - j];
        values[j] = w[k - 1 - j];
    }
    return LeftContStep(kNegInf, std::move(bounds), std::move(values), 0.0);
}

LeftContStep inverse_of_inverse(const LeftContStep& Uhat) {
    const LeftContStep h = Uhat.merged();
    const auto& g = h.bounds();   // gamma_k < ... < gamma_1
    const auto& t = h.values();   // w_k > ... > w_1 (tau values)
    const std::size_t k = g.size();
    std::vector<double> bounds(k), values(k);
    for (std::size_t j = 0; j < k; ++j) {
        bounds[j] = t[k - 1 - j];
        values[j] = g[k - 1 - j];
    }
    return LeftContStep(0.0, std::move(bounds), std::move(values));
}

double argmax_characterization(const CadlagStep& Fplus, double a) {
    const auto& k = Fplus.knots();
    // candidates: every knot with its point value, plus t=1 on the last piece
    double best_t = k[0].t;
    double best_y = Fplus.point_value(0);
    auto challenge = [&](double t, double y) {
        // accept when (y - best_y) - a (t - best_t) >= 0; ties go to larger t
        if (detail::det2_sign(y - best_y, 1.0, a, t - best_t) >= 0) {
            best_t = t;
            best_y = y;
        }
    };
    for (std::size_t i = 1; i < k.size(); ++i) challenge(k[i].t, Fplus.point_value(i));
    if (k.back().t < 1.0) challenge(1.0, k.back().y);
    return best_t;
}

JumpStructure jump_structure(const LeftContStep& fhat) {
    if (!fhat.is_nonincreasing())
        throw std::domain_error("jump_structure: input must be nonincreasing");
    const LeftContStep h = fhat.merged();
    JumpStructure js;
    js.n_flat = static_cast<std::int64_t>(h.pieces());
    js.gamma = h.values();
    js.tau.assign(h.bounds().begin(), h.bounds().end() - 1);

    // switch relations, identity by identity against the materialized inverse
    const LeftContStep Uhat = inverse_estimator(h);
    for (std::size_t i = 0; i + 1 < h.pieces(); ++i) {
        if (h.eval(js.tau[i]) != js.gamma[i] || Uhat.eval(js.gamma[i]) != js.tau[i])
            throw std::logic_error("jump_structure: switch identity violated");
    }
    if (Uhat.eval(js.gamma.back()) != h.domain_end())
        throw std::logic_error("jump_structure: boundary switch identity violated");
    return js;
}

double max_spacing(const JumpStructure& js) {
    double prev = 0.0, best = 0.0;
    for (double t : js.tau) {
        best = std::max(best, t - prev);
        prev = t;
    }
    return std::max(best, 1.0 - prev);
}

double sup_inverse_distance(const LeftContStep& Uhat, const std::function<double(double)>& g,
                            double a_lo, double a_hi) {
    if (!(a_lo <= a_hi)) throw std::domain_error("sup_inverse_distance: a_lo > a_hi");
    double best = std::fabs(Uhat.eval(a_lo) - g(a_lo));
    const auto& bounds = Uhat.bounds();
    double prev = a_lo;
    for (std::size_t i = 0; i < bounds.size() && prev < a_hi; ++i) {
        if (bounds[i] <= a_lo) continue;
        const double hi = std::min(bounds[i], a_hi);
        const double v = Uhat.eval(hi);  // piece value on (prev, hi]
        best = std::max(best, std::fabs(v - g(prev)));
        best = std::max(best, std::fabs(v - g(hi)));
        prev = hi;
    }
    if (prev < a_hi) {  // tail piece above the last jump
        const double v = Uhat.eval(a_hi);
        best = std::max(best, std::fabs(v - g(prev)));
        best = std::max(best, std::fabs(v - g(a_hi)));
    }
    return best;
}

double sup_inverse_distance(const LeftContStep& Uhat, const MonotoneModel& model, double a_lo,
                            double a_hi) {
    return sup_inverse_distance(
        Uhat, [&model](double a) { return model.g(a); }, a_lo, a_hi);
}

double sup_inverse_distance_all(const LeftContStep& Uhat, const MonotoneModel& model) {
    return sup_inverse_distance(Uhat, model, model.f(1.0), model.f(0.0));
}

}  // namespace grensup
