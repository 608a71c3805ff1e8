#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spectral_da/errors.hpp"
#include "spectral_da/spectrum.hpp"

namespace spectral_da {

// Power-decay continuation: coefficient scale * i^(-exponent) for i >= start.
// exponent > 1/2 keeps the element inside the Hilbert space.
struct PowerTail {
    double scale;
    double exponent;
    std::int64_t start;
};

// Continuation of an adversarially constructed data vector. Past the
// materialized support the sequence keeps placing sqrt(eigenvalue) spikes on
// the subsequence selected by scanning `spectrum` against the thresholds
// delta^2 / 2^k, k = next_k, next_k+1, ...; indices start at min_index and
// stay strictly increasing. Everything needed to extend the prefix is here.
struct AdversarialTail {
    SpectrumModel spectrum;
    double delta = 0.0;
    double sign = 1.0;                    // -1 after appearing as a subtrahend
    std::vector<std::int64_t> indices;    // materialized subsequence (provenance)
    std::int64_t next_k = 1;              // next threshold exponent
    std::int64_t min_index = 1;           // scan resumes strictly above min_index - 1
};

// Index growth during adversarial scans is at least geometric; indices close
// to the int64 range cannot be materialized and the scan stops there.
inline constexpr std::int64_t kAdversarialIndexCap = std::int64_t{1} << 62;

// An element of the Hilbert space as Fourier coefficients in the shared
// eigenbasis: finite explicit support, plus at most one continuation (power
// tail or adversarial). Support entries override the continuation formula at
// their index, mirroring the spectrum prefix idiom.
class CoeffSeq {
public:
    CoeffSeq() = default;

    CoeffSeq(std::vector<std::pair<std::int64_t, double>> support,
             std::optional<PowerTail> tail = std::nullopt,
             std::optional<AdversarialTail> adversarial = std::nullopt)
        : support_(std::move(support)), tail_(std::move(tail)), adv_(std::move(adversarial)) {
        std::int64_t prev = 0;
        for (const auto& [idx, val] : support_) {
            if (idx < 1) throw std::invalid_argument("coefficient index must be >= 1");
            if (idx <= prev) throw std::invalid_argument("support indices must be strictly increasing");
            if (!std::isfinite(val)) throw std::invalid_argument("coefficient values must be finite");
            prev = idx;
        }
        if (tail_ && adv_)
            throw std::invalid_argument("a sequence carries at most one continuation");
        if (tail_) {
            if (tail_->scale == 0.0 || !std::isfinite(tail_->scale))
                throw std::invalid_argument("tail scale must be nonzero and finite");
            if (!(tail_->exponent > 0.5))
                throw std::invalid_argument("tail exponent must exceed 1/2");
            if (tail_->start < 1) throw std::invalid_argument("tail start must be >= 1");
        }
        if (adv_ && !(adv_->delta > 0.0))
            throw std::invalid_argument("adversarial delta must be positive");
    }

    static CoeffSeq zero() { return CoeffSeq(); }
    static CoeffSeq basis(std::int64_t i, double v = 1.0) { return CoeffSeq({{i, v}}); }

    const std::vector<std::pair<std::int64_t, double>>& support() const { return support_; }
    const std::optional<PowerTail>& tail() const { return tail_; }
    const std::optional<AdversarialTail>& adversarial() const { return adv_; }

    std::int64_t last_support_index() const {
        return support_.empty() ? 0 : support_.back().first;
    }

    bool is_finite_support() const { return !tail_ && !adv_; }

    // Coefficient at mode i: support value if present, else the continuation
    // formula, else 0.
    double coefficient(std::int64_t i) const {
        if (i < 1) throw std::invalid_argument("coefficient: mode index must be >= 1");
        auto it = std::lower_bound(support_.begin(), support_.end(), i,
                                   [](const auto& e, std::int64_t key) { return e.first < key; });
        if (it != support_.end() && it->first == i) return it->second;
        if (tail_ && i >= tail_->start)
            return tail_->scale * std::pow(static_cast<double>(i), -tail_->exponent);
        if (adv_ && is_continuation_index(*adv_, i))
            return adv_->sign * std::sqrt(adv_->spectrum.eigenvalue(i));
        return 0.0;
    }

    // x scaled by t. Adversarial continuations only admit sign flips; any
    // other factor would break the sqrt(eigenvalue) formula.
    CoeffSeq scaled(double t) const {
        std::vector<std::pair<std::int64_t, double>> sup;
        sup.reserve(support_.size());
        for (const auto& [i, v] : support_) sup.emplace_back(i, t * v);
        std::optional<PowerTail> tail;
        if (tail_ && t != 0.0) tail = PowerTail{tail_->scale * t, tail_->exponent, tail_->start};
        std::optional<AdversarialTail> adv;
        if (adv_) {
            if (t != 1.0 && t != -1.0)
                throw TailMismatch("adversarial continuation admits only sign changes");
            adv = *adv_;
            adv->sign *= t;
        }
        return CoeffSeq(std::move(sup), tail, std::move(adv));
    }

    // Membership test for the non-materialized part of an adversarial
    // continuation. Enumerates the scan; indices grow at least geometrically,
    // so the walk to any representable i is short.
    static bool is_continuation_index(const AdversarialTail& adv, std::int64_t i) {
        if (i < adv.min_index) return false;
        std::int64_t after = adv.min_index - 1;
        std::int64_t k = adv.next_k;
        while (true) {
            double threshold = adv.delta * adv.delta * std::exp2(-static_cast<double>(k));
            std::int64_t idx = adv.spectrum.first_index_at_most(threshold, after, kAdversarialIndexCap);
            if (idx == 0 || idx > i) return false;
            if (idx == i) return true;
            after = idx;
            ++k;
        }
    }

private:
    std::vector<std::pair<std::int64_t, double>> support_;
    std::optional<PowerTail> tail_;
    std::optional<AdversarialTail> adv_;
};

// a - b under the closed-universe rules: supports merge; power tails must
// agree in exponent and start (or one side must lack one); adversarial
// continuations survive only against finite-support or power-tail-free
// opponents whose support misses the continuation indices.
inline CoeffSeq subtract(const CoeffSeq& a, const CoeffSeq& b) {
    if (a.adversarial() && b.adversarial())
        throw TailMismatch("cannot combine two adversarial continuations");
    if ((a.adversarial() && b.tail()) || (b.adversarial() && a.tail()))
        throw TailMismatch("cannot mix an adversarial continuation with a power tail");

    std::optional<PowerTail> tail;
    if (a.tail() && b.tail()) {
        if (a.tail()->exponent != b.tail()->exponent || a.tail()->start != b.tail()->start)
            throw TailMismatch("power tails differ in exponent or start");
        double scale = a.tail()->scale - b.tail()->scale;
        if (scale != 0.0) tail = PowerTail{scale, a.tail()->exponent, a.tail()->start};
    } else if (a.tail()) {
        tail = a.tail();
    } else if (b.tail()) {
        tail = PowerTail{-b.tail()->scale, b.tail()->exponent, b.tail()->start};
    }

    std::optional<AdversarialTail> adv;
    const CoeffSeq* adv_side = a.adversarial() ? &a : (b.adversarial() ? &b : nullptr);
    const CoeffSeq* other = a.adversarial() ? &b : &a;
    if (adv_side) {
        adv = *adv_side->adversarial();
        if (adv_side == &b) adv->sign *= -1.0;
        // support entries of the opponent may not land on future continuation
        // indices; the continuation formula cannot absorb an offset there
        for (const auto& [i, v] : other->support()) {
            if (i >= adv->min_index && CoeffSeq::is_continuation_index(*adv, i))
                throw TailMismatch("support collides with adversarial continuation index");
        }
    }

    std::vector<std::pair<std::int64_t, double>> sup;
    sup.reserve(a.support().size() + b.support().size());
    auto ia = a.support().begin();
    auto ib = b.support().begin();
    while (ia != a.support().end() || ib != b.support().end()) {
        std::int64_t i;
        if (ib == b.support().end()) i = ia->first;
        else if (ia == a.support().end()) i = ib->first;
        else i = std::min(ia->first, ib->first);
        sup.emplace_back(i, a.coefficient(i) - b.coefficient(i));
        if (ia != a.support().end() && ia->first == i) ++ia;
        if (ib != b.support().end() && ib->first == i) ++ib;
    }
    return CoeffSeq(std::move(sup), tail, std::move(adv));
}

}  // namespace spectral_da
