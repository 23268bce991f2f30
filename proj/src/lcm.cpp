#include "grensup/lcm.hpp"

#include <algorithm>
#include <stdexcept>

namespace grensup {

double ConcaveEnvelope::value(double t) const {
    if (vertices.empty()) throw std::logic_error("ConcaveEnvelope: empty");
    if (!(t >= vertices.front().t && t <= vertices.back().t))
        throw std::domain_error("ConcaveEnvelope::value: t outside envelope domain");
    auto it = std::lower_bound(vertices.begin(), vertices.end(), t,
                               [](const Knot& k, double v) { return k.t < v; });
    if (it->t == t) return it->y;
    const Knot& r = *it;
    const Knot& l = *(it - 1);
    const double w = (t - l.t) / (r.t - l.t);
    return l.y + w * (r.y - l.y);
}

nlohmann::json ConcaveEnvelope::to_json() const {
    nlohmann::json jv = nlohmann::json::array();
    for (const auto& k : vertices) jv.push_back({{"t", k.t}, {"y", k.y}});
    return {{"vertices", std::move(jv)}};
}

ConcaveEnvelope ConcaveEnvelope::from_json(const nlohmann::json& j) {
    ConcaveEnvelope env;
    for (const auto& rec : j.at("vertices"))
        env.vertices.push_back({rec.at("t").get<double>(), rec.at("y").get<double>()});
    return env;
}

ConcaveEnvelope least_concave_majorant(std::span<const Knot> points) {
    if (points.size() < 2)
        throw std::domain_error("least_concave_majorant: need at least two points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i - 1].t < points[i].t))
            throw std::domain_error("least_concave_majorant: points not strictly increasing in t");

    ConcaveEnvelope env;
    auto& hull = env.vertices;
    hull.reserve(points.size());
    for (const Knot& p : points) {
        // keep strictly decreasing chord slopes; pop colinear middles too
        while (hull.size() >= 2 &&
               detail::slope_turn(hull[hull.size() - 2], hull.back(), p) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    return env;
}

std::vector<Knot> majorant_points(const CadlagStep& Fplus) {
    const auto& k = Fplus.knots();
    std::vector<Knot> pts;
    pts.reserve(k.size() + 1);
    for (std::size_t i = 0; i < k.size(); ++i) pts.push_back({k[i].t, Fplus.point_value(i)});
    if (pts.back().t < 1.0) pts.push_back({1.0, k.back().y});
    return pts;
}

LeftContStep slope_process(const ConcaveEnvelope& env) {
    const auto& v = env.vertices;
    if (v.size() < 2) throw std::domain_error("slope_process: envelope needs two vertices");
    std::vector<double> bounds(v.size() - 1);
    std::vector<double> slopes(v.size() - 1);
    for (std::size_t i = 1; i < v.size(); ++i) {
        bounds[i - 1] = v[i].t;
        slopes[i - 1] = (v[i].y - v[i - 1].y) / (v[i].t - v[i - 1].t);
    }
    return LeftContStep(v.front().t, std::move(bounds), std::move(slopes));
}

LeftContStep slope_estimator(const CadlagStep& Fn) {
    return slope_process(least_concave_majorant(majorant_points(upper_version(Fn))));
}

}  // namespace grensup
