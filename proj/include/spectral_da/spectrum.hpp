#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral_da/errors.hpp"

namespace spectral_da {

// Eventually-exact description of a positive sequence,
//
//   u(i) = coef * i^power * geo^i   for every index past some finite prefix.
//
// The three eigenvalue families and all their products and quotients stay in
// this shape, which is what makes every convergence question decidable.
struct GrowthForm {
    double coef = 0.0;
    double power = 0.0;
    double geo = 1.0;

    double eval(double i) const { return coef * std::pow(i, power) * std::pow(geo, i); }

    friend GrowthForm operator*(const GrowthForm& a, const GrowthForm& b) {
        return {a.coef * b.coef, a.power + b.power, a.geo * b.geo};
    }
    friend GrowthForm operator/(const GrowthForm& a, const GrowthForm& b) {
        return {a.coef / b.coef, a.power - b.power, a.geo / b.geo};
    }
};

// Limit of a GrowthForm sequence as the index grows.
enum class FormLimitKind { Zero, PositiveFinite, Infinite };

struct FormLimit {
    FormLimitKind kind;
    double value;  // meaningful for PositiveFinite only
};

inline FormLimit form_limit(const GrowthForm& f) {
    if (f.coef == 0.0) return {FormLimitKind::Zero, 0.0};
    if (f.geo > 1.0) return {FormLimitKind::Infinite, 0.0};
    if (f.geo < 1.0) return {FormLimitKind::Zero, 0.0};
    if (f.power > 0.0) return {FormLimitKind::Infinite, 0.0};
    if (f.power < 0.0) return {FormLimitKind::Zero, 0.0};
    return {FormLimitKind::PositiveFinite, f.coef};
}

// A positive eigenvalue sequence in the shared eigenbasis: one of three decay
// families, with an optional finite prefix of explicit values overriding
// modes 1..m. Stands for a covariance operator diagonal in that basis.
class SpectrumModel {
public:
    enum class Family { PowerLaw, Exponential, Constant };

    // scale * i^(-exponent)
    static SpectrumModel power_law(double scale, double exponent, std::vector<double> prefix = {}) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("power-law spectrum: scale must be positive");
        if (!(exponent >= 0.0) || !std::isfinite(exponent))
            throw std::invalid_argument("power-law spectrum: exponent must be nonnegative");
        return SpectrumModel(Family::PowerLaw, scale, exponent, std::move(prefix));
    }
    // scale * ratio^i
    static SpectrumModel exponential(double scale, double ratio, std::vector<double> prefix = {}) {
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("exponential spectrum: scale must be positive");
        if (!(ratio > 0.0 && ratio < 1.0))
            throw std::invalid_argument("exponential spectrum: ratio must lie in (0,1)");
        return SpectrumModel(Family::Exponential, scale, ratio, std::move(prefix));
    }
    // constant level
    static SpectrumModel constant(double level, std::vector<double> prefix = {}) {
        if (!(level > 0.0) || !std::isfinite(level))
            throw std::invalid_argument("constant spectrum: level must be positive");
        return SpectrumModel(Family::Constant, level, 0.0, std::move(prefix));
    }

    Family family() const { return family_; }
    double scale() const { return scale_; }
    // family parameter: decay exponent (PowerLaw) or ratio (Exponential); 0 for Constant
    double param() const { return param_; }
    const std::vector<double>& prefix() const { return prefix_; }
    std::int64_t prefix_size() const { return static_cast<std::int64_t>(prefix_.size()); }

    // Eigenvalue at mode i >= 1. Prefix overrides the family formula.
    double eigenvalue(std::int64_t i) const {
        if (i < 1) throw std::invalid_argument("eigenvalue: mode index must be >= 1");
        if (i <= prefix_size()) return prefix_[static_cast<std::size_t>(i - 1)];
        return family_value(i);
    }

    // inf over all modes; exact from the family shape and the prefix minimum.
    double lower_bound() const {
        double tail_inf;
        switch (family_) {
            case Family::PowerLaw: tail_inf = (param_ > 0.0) ? 0.0 : scale_; break;
            case Family::Exponential: tail_inf = 0.0; break;
            case Family::Constant: tail_inf = scale_; break;
            default: tail_inf = 0.0;
        }
        double lo = tail_inf;
        for (double v : prefix_) lo = std::min(lo, v);
        return lo;
    }

    // Exact closed form valid for every mode past the prefix.
    GrowthForm tail_form() const {
        switch (family_) {
            case Family::PowerLaw: return {scale_, -param_, 1.0};
            case Family::Exponential: return {scale_, 0.0, param_};
            case Family::Constant: return {scale_, 0.0, 1.0};
        }
        return {scale_, 0.0, 1.0};
    }

    // Smallest mode index > after with eigenvalue <= threshold, or 0 when no
    // such index exists at or below cap. Uses the closed-form inverse of the
    // family, then verifies against the exact eigenvalue to absorb rounding.
    std::int64_t first_index_at_most(double threshold, std::int64_t after, std::int64_t cap) const {
        if (!(threshold > 0.0)) return 0;
        // prefix region: plain scan
        for (std::int64_t i = after + 1; i <= prefix_size() && i <= cap; ++i)
            if (prefix_[static_cast<std::size_t>(i - 1)] <= threshold) return i;
        std::int64_t start = std::max(after, prefix_size());
        double guess = 1.0;
        switch (family_) {
            case Family::PowerLaw:
                if (param_ == 0.0) return (scale_ <= threshold) ? bounded(start + 1, cap) : 0;
                guess = std::pow(scale_ / threshold, 1.0 / param_);
                break;
            case Family::Exponential:
                guess = std::log(scale_ / threshold) / std::log(1.0 / param_);
                break;
            case Family::Constant:
                return (scale_ <= threshold) ? bounded(start + 1, cap) : 0;
        }
        std::int64_t cand = start + 1;
        if (std::isfinite(guess) && guess > static_cast<double>(cand)) {
            if (guess > static_cast<double>(cap) + 2.0) return 0;
            cand = std::max(cand, static_cast<std::int64_t>(std::floor(guess)) - 1);
        }
        while (cand <= cap && family_value(cand) > threshold) ++cand;
        return (cand <= cap) ? cand : 0;
    }

    friend bool operator==(const SpectrumModel& a, const SpectrumModel& b) {
        return a.family_ == b.family_ && a.scale_ == b.scale_ && a.param_ == b.param_ &&
               a.prefix_ == b.prefix_;
    }
    friend bool operator!=(const SpectrumModel& a, const SpectrumModel& b) { return !(a == b); }

private:
    SpectrumModel(Family f, double scale, double param, std::vector<double> prefix)
        : family_(f), scale_(scale), param_(param), prefix_(std::move(prefix)) {
        for (double v : prefix_) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("spectrum prefix: eigenvalues must be strictly positive");
        }
    }

    static std::int64_t bounded(std::int64_t i, std::int64_t cap) { return i <= cap ? i : 0; }

    double family_value(std::int64_t i) const {
        switch (family_) {
            case Family::PowerLaw: return scale_ * std::pow(static_cast<double>(i), -param_);
            case Family::Exponential: return scale_ * std::pow(param_, static_cast<double>(i));
            case Family::Constant: return scale_;
        }
        return scale_;
    }

    Family family_;
    double scale_;
    double param_;
    std::vector<double> prefix_;
};

// Classification of lim p_i/r_i for two eigenvalue sequences. Prefixes are
// ignored; the limit depends only on the family tails.
struct RatioLimit {
    FormLimitKind kind;
    double value;  // the limit when PositiveFinite
};

inline RatioLimit ratio_limit(const SpectrumModel& p, const SpectrumModel& r) {
    FormLimit lim = form_limit(p.tail_form() / r.tail_form());
    return {lim.kind, lim.value};
}

}  // namespace spectral_da
