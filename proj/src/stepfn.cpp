#include "grensup/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grensup {

namespace {

void check_knots(const std::vector<Knot>& knots) {
    if (knots.empty()) throw std::invalid_argument("CadlagStep: no knots");
    if (knots.front().t != 0.0)
        throw std::invalid_argument("CadlagStep: first knot must sit at t=0");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(knots[i].t >= 0.0 && knots[i].t <= 1.0) || !std::isfinite(knots[i].y))
            throw std::invalid_argument("CadlagStep: knot outside domain or non-finite");
        if (i > 0 && !(knots[i - 1].t < knots[i].t))
            throw std::invalid_argument("CadlagStep: knot abscissae must be strictly increasing");
    }
}

}  // namespace

CadlagStep::CadlagStep(std::vector<Knot> knots) : knots_(std::move(knots)) {
    check_knots(knots_);
}

CadlagStep::CadlagStep(std::vector<Knot> knots, std::vector<double> point_values)
    : knots_(std::move(knots)), point_(std::move(point_values)), lifted_(true) {
    check_knots(knots_);
    if (point_.size() != knots_.size())
        throw std::invalid_argument("CadlagStep: point value list size mismatch");
    for (std::size_t i = 0; i < knots_.size(); ++i)
        if (point_[i] < knots_[i].y)
            throw std::invalid_argument("CadlagStep: point value below piece value");
}

double CadlagStep::eval(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("CadlagStep::eval: t outside [0,1]");
    // greatest knot with knot.t <= t
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const Knot& k) { return v < k.t; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (lifted_ && knots_[i].t == t) return point_[i];
    return knots_[i].y;
}

double CadlagStep::left_limit(double t) const {
    if (!(t > 0.0 && t <= 1.0)) throw std::domain_error("CadlagStep::left_limit: t outside (0,1]");
    // value of the piece strictly left of t
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                               [](const Knot& k, double v) { return k.t < v; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    return knots_[i - 1].y;
}

CadlagStep upper_version(const CadlagStep& F) {
    const auto& k = F.knots();
    std::vector<double> point(k.size());
    point[0] = F.point_value(0);
    bool any = false;
    for (std::size_t i = 1; i < k.size(); ++i) {
        point[i] = std::max(F.point_value(i), k[i - 1].y);
        any = any || point[i] > k[i].y;
    }
    if (!any && !F.has_lifted_points()) return F;
    return CadlagStep(k, std::move(point));
}

nlohmann::json CadlagStep::to_json() const {
    nlohmann::json jk = nlohmann::json::array();
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        nlohmann::json rec = {{"t", knots_[i].t}, {"y", knots_[i].y}};
        if (lifted_ && point_[i] != knots_[i].y) rec["y_at"] = point_[i];
        jk.push_back(std::move(rec));
    }
    return {{"continuity", "right"}, {"knots", std::move(jk)}};
}

CadlagStep CadlagStep::from_json(const nlohmann::json& j) {
    if (j.at("continuity").get<std::string>() != "right")
        throw std::invalid_argument("CadlagStep::from_json: wrong continuity tag");
    std::vector<Knot> knots;
    std::vector<double> point;
    bool lifted = false;
    for (const auto& rec : j.at("knots")) {
        knots.push_back({rec.at("t").get<double>(), rec.at("y").get<double>()});
        point.push_back(rec.contains("y_at") ? rec.at("y_at").get<double>() : knots.back().y);
        lifted = lifted || rec.contains("y_at");
    }
    if (lifted) return CadlagStep(std::move(knots), std::move(point));
    return CadlagStep(std::move(knots));
}

LeftContStep::LeftContStep(double domain_start, std::vector<double> bounds,
                           std::vector<double> values, std::optional<double> above)
    : domain_start_(domain_start),
      bounds_(std::move(bounds)),
      values_(std::move(values)),
      above_(above) {
    if (bounds_.empty() || bounds_.size() != values_.size())
        throw std::invalid_argument("LeftContStep: bounds/values size mismatch");
    if (!(domain_start_ < bounds_.front()))
        throw std::invalid_argument("LeftContStep: domain start must precede first bound");
    for (std::size_t i = 1; i < bounds_.size(); ++i)
        if (!(bounds_[i - 1] < bounds_[i]))
            throw std::invalid_argument("LeftContStep: bounds must be strictly increasing");
}

double LeftContStep::eval(double x) const {
    if (x > bounds_.back()) {
        if (above_) return *above_;
        throw std::domain_error("LeftContStep::eval: x beyond domain");
    }
    if (x < domain_start_) throw std::domain_error("LeftContStep::eval: x before domain");
    // first bound >= x; value at domain_start is values_[0]
    auto it = std::lower_bound(bounds_.begin(), bounds_.end(), x);
    return values_[static_cast<std::size_t>(it - bounds_.begin())];
}

bool LeftContStep::is_nonincreasing() const {
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] > values_[i - 1]) return false;
    if (above_ && !values_.empty() && *above_ > values_.back()) return false;
    return true;
}

LeftContStep LeftContStep::merged() const {
    std::vector<double> b, v;
    b.reserve(bounds_.size());
    v.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!v.empty() && v.back() == values_[i]) {
            b.back() = bounds_[i];  // extend the run
        } else {
            b.push_back(bounds_[i]);
            v.push_back(values_[i]);
        }
    }
    return LeftContStep(domain_start_, std::move(b), std::move(v), above_);
}

nlohmann::json LeftContStep::to_json() const {
    nlohmann::json jk = nlohmann::json::array();
    for (std::size_t i = 0; i < bounds_.size(); ++i)
        jk.push_back({{"t", bounds_[i]}, {"y", values_[i]}});
    nlohmann::json j = {{"continuity", "left"},
                        {"domain_start", domain_start_},
                        {"knots", std::move(jk)}};
    if (above_) j["above"] = *above_;
    return j;
}

LeftContStep LeftContStep::from_json(const nlohmann::json& j) {
    if (j.at("continuity").get<std::string>() != "left")
        throw std::invalid_argument("LeftContStep::from_json: wrong continuity tag");
    std::vector<double> b, v;
    for (const auto& rec : j.at("knots")) {
        b.push_back(rec.at("t").get<double>());
        v.push_back(rec.at("y").get<double>());
    }
    std::optional<double> above;
    if (j.contains("above")) above = j.at("above").get<double>();
    return LeftContStep(j.at("domain_start").get<double>(), std::move(b), std::move(v), above);
}

namespace {

// Shared sup scan: pieces given as (lo_i, hi_i] with value v_i, plus point
// values at abscissae p_j.  h2 is continuous and monotone on each piece, so
// the piece sup is attained at (the closure of) its endpoints.
struct SupScan {
    double best = 0.0;
    void piece(double lo, double hi, double v, const std::function<double(double)>& h2) {
        best = std::max(best, std::fabs(v - h2(lo)));
        best = std::max(best, std::fabs(v - h2(hi)));
    }
    void point(double t, double v, const std::function<double(double)>& h2) {
        best = std::max(best, std::fabs(v - h2(t)));
    }
};

}  // namespace

double sup_abs_diff(const CadlagStep& h1, const std::function<double(double)>& h2, double a,
                    double b) {
    if (!(a <= b)) throw std::domain_error("sup_abs_diff: empty interval bounds reversed");
    if (!(a >= 0.0 && b <= 1.0)) throw std::domain_error("sup_abs_diff: interval outside [0,1]");
    if (a == b) return 0.0;
    SupScan scan;
    const auto& k = h1.knots();
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double lo = std::max(k[i].t, a);
        const double hi = std::min(i + 1 < k.size() ? k[i + 1].t : 1.0, b);
        if (lo < hi) scan.piece(lo, hi, k[i].y, h2);
        if (k[i].t > a && k[i].t <= b) scan.point(k[i].t, h1.point_value(i), h2);
    }
    if (b <= 1.0) scan.point(b, h1.eval(b), h2);
    return scan.best;
}

double sup_abs_diff(const LeftContStep& h1, const std::function<double(double)>& h2, double a,
                    double b) {
    if (!(a <= b)) throw std::domain_error("sup_abs_diff: empty interval bounds reversed");
    if (a == b) return 0.0;
    SupScan scan;
    const auto& bounds = h1.bounds();
    const auto& vals = h1.values();
    double prev = h1.domain_start();
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const double lo = std::max(prev, a);
        const double hi = std::min(bounds[i], b);
        if (lo < hi) scan.piece(lo, hi, vals[i], h2);
        prev = bounds[i];
    }
    if (h1.above_value() && b > bounds.back()) {
        const double lo = std::max(bounds.back(), a);
        if (lo < b) scan.piece(lo, b, *h1.above_value(), h2);
    }
    return scan.best;
}

}  // namespace grensup
