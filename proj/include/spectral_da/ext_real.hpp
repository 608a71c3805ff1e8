#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace spectral_da {

// A value in the extended real line with total arithmetic on the cones the
// library uses: squared norms and costs live in [0, +inf], log normalization
// constants in [-inf, 0]. exp(-inf) = 0 exactly.
class ExtReal {
public:
    static ExtReal finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite: value is not finite");
        return ExtReal(v);
    }
    static ExtReal pos_infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }
    static ExtReal neg_infinity() { return ExtReal(-std::numeric_limits<double>::infinity()); }

    bool is_finite() const { return std::isfinite(v_); }
    bool is_pos_infinity() const { return std::isinf(v_) && v_ > 0; }
    bool is_neg_infinity() const { return std::isinf(v_) && v_ < 0; }

    // Finite payload; throws on infinities so callers cannot silently read garbage.
    double value() const {
        if (!is_finite()) throw std::logic_error("ExtReal::value on an infinite value");
        return v_;
    }

    // exp with the convention exp(-inf) = 0; exact in IEEE arithmetic.
    double exp() const { return std::exp(v_); }

    friend ExtReal operator+(ExtReal a, ExtReal b) {
        if ((a.is_pos_infinity() && b.is_neg_infinity()) ||
            (a.is_neg_infinity() && b.is_pos_infinity()))
            throw std::logic_error("ExtReal: +inf + -inf is undefined");
        return ExtReal(a.v_ + b.v_);
    }
    ExtReal& operator+=(ExtReal b) { return *this = *this + b; }

    friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
    friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
    friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }

    std::string str() const {
        if (is_pos_infinity()) return "inf";
        if (is_neg_infinity()) return "-inf";
        return std::to_string(v_);
    }
    friend std::ostream& operator<<(std::ostream& os, ExtReal x) { return os << x.str(); }

private:
    explicit ExtReal(double v) : v_(v) {}
    double v_;
};

}  // namespace spectral_da
