#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

namespace grensup {

struct Knot {
    double t;
    double y;
    friend bool operator==(const Knot&, const Knot&) = default;
};

// Right-continuous step function on [0,1] with finitely many jumps.
//
// knots()[i].y is the value on [t_i, t_{i+1}); the first knot sits at t=0 and
// defines the value there.  An upper version additionally carries per-knot
// point values >= the piece values; eval() returns the point value exactly at
// a knot and the piece value elsewhere, so the "value at t equals max of the
// two one-sided limits" convention of F_n^+ is representable.
class CadlagStep {
  public:
    explicit CadlagStep(std::vector<Knot> knots);
    CadlagStep(std::vector<Knot> knots, std::vector<double> point_values);

    double eval(double t) const;        // t in [0,1]
    double left_limit(double t) const;  // t in (0,1]

    const std::vector<Knot>& knots() const { return knots_; }
    double point_value(std::size_t i) const { return lifted_ ? point_[i] : knots_[i].y; }
    bool has_lifted_points() const { return lifted_; }
    std::size_t size() const { return knots_.size(); }

    nlohmann::json to_json() const;
    static CadlagStep from_json(const nlohmann::json& j);

  private:
    std::vector<Knot> knots_;
    std::vector<double> point_;  // only filled when lifted_
    bool lifted_ = false;
};

// G(0)=F(0); G(t)=max{F(t), F(t-)} for t in (0,1].  Idempotent.
CadlagStep upper_version(const CadlagStep& F);

// Nonincreasing-or-general left-continuous step function.
//
// Piece i is (bounds[i-1], bounds[i]] with value values[i]; the first piece
// extends down to domain_start (value there = values[0] by the
// f(0)=lim_{t->0+} convention).  Evaluation above bounds.back() returns
// above_value() when set (used by inverse processes on the whole real line)
// and is a domain error otherwise.
class LeftContStep {
  public:
    LeftContStep(double domain_start, std::vector<double> bounds, std::vector<double> values,
                 std::optional<double> above = std::nullopt);

    double eval(double x) const;

    double domain_start() const { return domain_start_; }
    double domain_end() const { return bounds_.back(); }
    const std::vector<double>& bounds() const { return bounds_; }
    const std::vector<double>& values() const { return values_; }
    std::optional<double> above_value() const { return above_; }
    std::size_t pieces() const { return values_.size(); }

    bool is_nonincreasing() const;
    // Merges adjacent pieces with equal values; canonical form for inverses.
    LeftContStep merged() const;

    nlohmann::json to_json() const;
    static LeftContStep from_json(const nlohmann::json& j);

  private:
    double domain_start_;
    std::vector<double> bounds_;
    std::vector<double> values_;
    std::optional<double> above_;
};

// Exact sup of |h1 - h2| over (a, b], h2 continuous and monotone on each
// constant piece of h1.  Inspects piece values, both one-sided limits at the
// knots of h1 and the interval endpoints; nothing is grid-sampled.
double sup_abs_diff(const CadlagStep& h1, const std::function<double(double)>& h2, double a,
                    double b);
double sup_abs_diff(const LeftContStep& h1, const std::function<double(double)>& h2, double a,
                    double b);

}  // namespace grensup
