#pragma once

// Symbolic-first series engine. Convergence of every series the library
// meets is decided by exact rules on closed-form term shapes (term test,
// p-series exponent, geometric ratio, limit comparison of log(1+u) with u),
// never by inspecting floating-point partial sums. Convergent series are then
// evaluated as a partial sum up to a configurable cutoff plus a rigorous tail
// enclosure (integral bounds for power decay, ratio bounds for geometric
// decay), with the bracket widened by one ulp per accumulated term to absorb
// roundoff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "spectral_da/coeff_seq.hpp"
#include "spectral_da/errors.hpp"
#include "spectral_da/ext_real.hpp"
#include "spectral_da/spectrum.hpp"

namespace spectral_da {

// Partial-sum cutoff N0 for certified values. Overridable through the
// SPECTRAL_DA_TAIL_CUTOFF environment variable (read once).
inline std::int64_t& tail_cutoff() {
    static std::int64_t n = [] {
        if (const char* env = std::getenv("SPECTRAL_DA_TAIL_CUTOFF")) {
            char* end = nullptr;
            long long v = std::strtoll(env, &end, 10);
            if (end && *end == '\0' && v >= 16) return static_cast<std::int64_t>(v);
        }
        return std::int64_t{100000};
    }();
    return n;
}

// Outcome of classifying a nonnegative-term series: either a certified value
// with an enclosure width, or a divergence certificate naming the rule fired.
struct SeriesVerdict {
    bool converges = false;
    double value = 0.0;          // enclosure midpoint when convergent
    double bracket_width = 0.0;  // hi - lo
    std::string certificate;
};

namespace detail {

struct Enclosure {
    double lo = 0.0;
    double hi = 0.0;
};

// Kahan-compensated accumulator that remembers how many terms it absorbed.
class CertSum {
public:
    void add(double t) {
        double y = t - comp_;
        double s = sum_ + y;
        comp_ = (s - sum_) - y;
        sum_ = s;
        ++terms_;
    }
    double sum() const { return sum_; }
    std::int64_t terms() const { return terms_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::int64_t terms_ = 0;
};

inline double ulp_of(double x) {
    double a = std::abs(x);
    if (a < 1e-300) a = 1e-300;
    return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

// One ulp of slack per accumulated term, on both ends.
inline Enclosure pad(Enclosure e, std::int64_t terms) {
    double scale = std::max(std::abs(e.lo), std::abs(e.hi));
    double p = static_cast<double>(terms + 2) * ulp_of(scale);
    return {e.lo - p, e.hi + p};
}

inline Enclosure operator+(Enclosure a, Enclosure b) { return {a.lo + b.lo, a.hi + b.hi}; }

// sup over i > n of a nonnegative form that does not grow (geo <= 1, and
// power <= 0 whenever geo == 1). For geo < 1 with power > 0 the form is
// unimodal; the sup sits at the mode or at n+1, whichever is later.
inline double form_sup_beyond(const GrowthForm& f, std::int64_t n) {
    if (f.coef == 0.0) return 0.0;
    if (f.geo > 1.0 || (f.geo == 1.0 && f.power > 0.0))
        return std::numeric_limits<double>::infinity();
    if (f.geo == 1.0 || f.power <= 0.0) return f.eval(static_cast<double>(n + 1));
    double mode = -f.power / std::log(f.geo);  // log(geo) < 0 here
    double best = f.eval(static_cast<double>(n + 1));
    for (double x : {std::floor(mode), std::ceil(mode)})
        if (x > static_cast<double>(n)) best = std::max(best, f.eval(x));
    return best;
}

// Enclosure of sum_{i>n} f(i) for a convergent positive form.
inline Enclosure form_tail_bracket(GrowthForm f, std::int64_t n) {
    if (f.coef == 0.0) return {0.0, 0.0};
    if (f.geo == 1.0) {
        // p-series: integral bounds  int_{n+1}..inf <= sum <= int_n..inf
        double beta = -f.power;
        double lo = f.coef * std::pow(static_cast<double>(n + 1), 1.0 - beta) / (beta - 1.0);
        double hi = f.coef * std::pow(static_cast<double>(n), 1.0 - beta) / (beta - 1.0);
        return {lo, hi};
    }
    // geometric factor < 1
    if (f.power == 0.0) {
        double v = f.coef * std::pow(f.geo, static_cast<double>(n + 1)) / (1.0 - f.geo);
        return {v, v};
    }
    Enclosure head{0.0, 0.0};
    // advance until the term ratio bound drops below 1, summing exact terms
    std::int64_t guard = 0;
    while (true) {
        double rho = (f.power < 0.0)
                         ? f.geo
                         : f.geo * std::pow(1.0 + 1.0 / static_cast<double>(n + 1), f.power);
        if (rho < 1.0) {
            double first = f.eval(static_cast<double>(n + 1));
            return {head.lo + first, head.hi + first / (1.0 - rho)};
        }
        double t = f.eval(static_cast<double>(n + 1));
        head.lo += t;
        head.hi += t;
        ++n;
        if (++guard > 10000000) throw UnsupportedSeries("geometric tail bound failed to stabilize");
    }
}

// true iff sum of the form terms converges; certificate names the rule
inline bool form_series_converges(const GrowthForm& f, std::string* why_diverges) {
    if (f.coef == 0.0) return true;
    if (f.geo < 1.0) return true;
    if (f.geo > 1.0) {
        if (why_diverges) *why_diverges = "terms grow without bound (geometric factor exceeds 1)";
        return false;
    }
    if (f.power < -1.0) return true;
    if (why_diverges) {
        if (f.power > 0.0)
            *why_diverges = "terms grow without bound (positive index power)";
        else if (f.power == 0.0)
            *why_diverges = "terms do not vanish (constant limit " + std::to_string(f.coef) + ")";
        else
            *why_diverges = "p-series exponent " + std::to_string(-f.power) +
                            " is at most 1 (limit comparison with the harmonic series)";
    }
    return false;
}

// Splits s1 (+ s2) into an exact dominant form plus a vanishing remainder.
struct DenomSplit {
    GrowthForm dom;
    GrowthForm sub;  // remainder; coef 0 when the split is exact
    bool exact;
};

inline DenomSplit denom_split(const SpectrumModel& s1, const std::optional<SpectrumModel>& s2) {
    GrowthForm f1 = s1.tail_form();
    if (!s2) return {f1, {0.0, 0.0, 1.0}, true};
    GrowthForm f2 = s2->tail_form();
    if (f1.geo == f2.geo && f1.power == f2.power)
        return {{f1.coef + f2.coef, f1.power, f1.geo}, {0.0, 0.0, 1.0}, true};
    bool first_dominates = (f1.geo != f2.geo) ? (f1.geo > f2.geo) : (f1.power > f2.power);
    return first_dominates ? DenomSplit{f1, f2, false} : DenomSplit{f2, f1, false};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TermModel: the closed universe of symbolic nonnegative term sequences.
// ---------------------------------------------------------------------------

namespace terms {

// s_i
struct SpectrumTerms {
    SpectrumModel s;
};

// num_i / den_i
struct RatioTerms {
    SpectrumModel num;
    SpectrumModel den;
};

// log(1 + num_i / den_i)
struct Log1pRatioTerms {
    SpectrumModel num;
    SpectrumModel den;
};

// d_i^2 / (s1_i [+ s2_i])
struct QuadOverSpectraTerms {
    CoeffSeq d;
    SpectrumModel s1;
    std::optional<SpectrumModel> s2;
};

// (num_i / den_i - 1)^2
struct SquaredRatioMinusOneTerms {
    SpectrumModel num;
    SpectrumModel den;
};

}  // namespace terms

class TermModel {
public:
    using Variant = std::variant<terms::SpectrumTerms, terms::RatioTerms, terms::Log1pRatioTerms,
                                 terms::QuadOverSpectraTerms, terms::SquaredRatioMinusOneTerms>;

    static TermModel spectrum_terms(SpectrumModel s) {
        return TermModel(terms::SpectrumTerms{std::move(s)});
    }
    static TermModel ratio_terms(SpectrumModel num, SpectrumModel den) {
        return TermModel(terms::RatioTerms{std::move(num), std::move(den)});
    }
    static TermModel log1p_ratio_terms(SpectrumModel num, SpectrumModel den) {
        return TermModel(terms::Log1pRatioTerms{std::move(num), std::move(den)});
    }
    static TermModel quad_over_spectra(CoeffSeq d, SpectrumModel s1,
                                       std::optional<SpectrumModel> s2 = std::nullopt) {
        return TermModel(terms::QuadOverSpectraTerms{std::move(d), std::move(s1), std::move(s2)});
    }
    static TermModel squared_ratio_minus_one(SpectrumModel num, SpectrumModel den) {
        return TermModel(terms::SquaredRatioMinusOneTerms{std::move(num), std::move(den)});
    }

    const Variant& variant() const { return v_; }

private:
    explicit TermModel(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

namespace detail {

inline SeriesVerdict verdict_from(Enclosure e, std::int64_t terms, std::string rule) {
    e = pad(e, terms);
    SeriesVerdict v;
    v.converges = true;
    v.value = 0.5 * (e.lo + e.hi);
    v.bracket_width = e.hi - e.lo;
    v.certificate = std::move(rule);
    return v;
}

inline SeriesVerdict diverges(std::string why) {
    SeriesVerdict v;
    v.converges = false;
    v.certificate = std::move(why);
    return v;
}

// Certified sum of a sequence that is exactly `form` past `explicit_end`,
// with exact per-index evaluation available through `eval`.
template <typename Eval>
SeriesVerdict certify_form_series(Eval&& eval, std::int64_t explicit_end, const GrowthForm& form,
                                  const std::string& rule) {
    CertSum acc;
    for (std::int64_t i = 1; i <= explicit_end; ++i) acc.add(eval(i));
    Enclosure tail;
    if (form.geo < 1.0 && form.power == 0.0) {
        // closed geometric form, no partial summation needed
        tail = form_tail_bracket(form, std::max<std::int64_t>(explicit_end, 0));
    } else {
        std::int64_t n = std::max(tail_cutoff(), explicit_end);
        for (std::int64_t i = explicit_end + 1; i <= n; ++i) acc.add(form.eval(static_cast<double>(i)));
        tail = form_tail_bracket(form, n);
    }
    Enclosure e{acc.sum() + tail.lo, acc.sum() + tail.hi};
    return verdict_from(e, acc.terms(), rule);
}

}  // namespace detail

// Exact convergence verdict for a term model, with a certified value on the
// convergent branch.
inline SeriesVerdict classify_series(const TermModel& model);

namespace detail {

inline SeriesVerdict classify_spectrum_terms(const terms::SpectrumTerms& t) {
    GrowthForm f = t.s.tail_form();
    std::string why;
    if (!form_series_converges(f, &why)) return diverges(why);
    std::int64_t e = t.s.prefix_size();
    std::string rule = (f.geo < 1.0) ? "geometric eigenvalue decay" : "p-series eigenvalue decay";
    return certify_form_series([&](std::int64_t i) { return t.s.eigenvalue(i); }, e, f, rule);
}

inline SeriesVerdict classify_ratio_terms(const terms::RatioTerms& t) {
    GrowthForm q = t.num.tail_form() / t.den.tail_form();
    std::string why;
    if (!form_series_converges(q, &why)) return diverges(why);
    std::int64_t e = std::max(t.num.prefix_size(), t.den.prefix_size());
    return certify_form_series(
        [&](std::int64_t i) { return t.num.eigenvalue(i) / t.den.eigenvalue(i); }, e, q,
        "eigenvalue ratio series converges");
}

inline SeriesVerdict classify_log1p_ratio_terms(const terms::Log1pRatioTerms& t) {
    GrowthForm q = t.num.tail_form() / t.den.tail_form();
    FormLimit lim = form_limit(q);
    if (lim.kind == FormLimitKind::Infinite)
        return diverges("terms do not vanish (eigenvalue ratio grows without bound)");
    if (lim.kind == FormLimitKind::PositiveFinite)
        return diverges("terms do not vanish (limit log(1 + " + std::to_string(lim.value) + "))");
    // ratio -> 0: log(1+u) ~ u, so the series shares the fate of sum u_i
    std::string why;
    if (!form_series_converges(q, &why))
        return diverges("limit comparison of log(1+u) with u: ratio series diverges (" + why + ")");
    std::int64_t e = std::max(t.num.prefix_size(), t.den.prefix_size());
    std::int64_t n = std::max(tail_cutoff(), e);
    CertSum acc;
    for (std::int64_t i = 1; i <= n; ++i)
        acc.add(std::log1p(t.num.eigenvalue(i) / t.den.eigenvalue(i)));
    Enclosure ratio_tail = form_tail_bracket(q, n);
    double u_sup = form_sup_beyond(q, n);
    // u - u^2/2 <= log(1+u) <= u for u >= 0
    double lo_factor = std::max(0.0, 1.0 - 0.5 * u_sup);
    Enclosure e_total{acc.sum() + lo_factor * ratio_tail.lo, acc.sum() + ratio_tail.hi};
    return verdict_from(e_total, acc.terms(), "limit comparison of log(1+u) with u");
}

inline SeriesVerdict classify_equiv_terms(const terms::SquaredRatioMinusOneTerms& t) {
    GrowthForm q = t.num.tail_form() / t.den.tail_form();
    bool eventually_one = (q.coef == 1.0 && q.power == 0.0 && q.geo == 1.0);
    std::int64_t e = std::max(t.num.prefix_size(), t.den.prefix_size());
    if (eventually_one) {
        CertSum acc;
        for (std::int64_t i = 1; i <= e; ++i) {
            double u = t.num.eigenvalue(i) / t.den.eigenvalue(i) - 1.0;
            acc.add(u * u);
        }
        return verdict_from({acc.sum(), acc.sum()}, acc.terms(),
                            "eigenvalue ratio is eventually exactly 1");
    }
    FormLimit lim = form_limit(q);
    if (lim.kind == FormLimitKind::Infinite)
        return diverges("squared ratio deviation grows without bound");
    double l = (lim.kind == FormLimitKind::Zero) ? 0.0 : lim.value;
    double dev = (l - 1.0) * (l - 1.0);
    return diverges("terms do not vanish (squared ratio deviation tends to " + std::to_string(dev) +
                    ")");
}

inline SeriesVerdict classify_quad(const terms::QuadOverSpectraTerms& t) {
    const CoeffSeq& d = t.d;
    const SpectrumModel& s1 = t.s1;
    const std::optional<SpectrumModel>& s2 = t.s2;
    DenomSplit den = denom_split(s1, s2);
    auto den_exact = [&](std::int64_t i) {
        return s1.eigenvalue(i) + (s2 ? s2->eigenvalue(i) : 0.0);
    };

    // --- symbolic classification ---
    GrowthForm num{0.0, 0.0, 1.0};
    if (d.tail()) {
        num = {d.tail()->scale * d.tail()->scale, -2.0 * d.tail()->exponent, 1.0};
        GrowthForm q = num / den.dom;
        std::string why;
        if (!form_series_converges(q, &why)) return diverges(why);
    }
    double adv_lower = 0.0;
    if (d.adversarial()) {
        const AdversarialTail& adv = *d.adversarial();
        bool matches = (adv.spectrum == s1) || (s2 && adv.spectrum == *s2);
        if (matches) {
            // terms along the subsequence: r'(i_k) / (r'(i_k) + other(i_k))
            if (!s2)
                return diverges("adversarial subsequence: terms equal 1");
            const SpectrumModel& other = (adv.spectrum == s1) ? *s2 : s1;
            FormLimit lim = form_limit(other.tail_form() / adv.spectrum.tail_form());
            if (lim.kind == FormLimitKind::Zero)
                return diverges("adversarial subsequence: terms approach 1");
            if (lim.kind == FormLimitKind::PositiveFinite)
                return diverges("adversarial subsequence: terms approach 1/(1+" +
                                std::to_string(lim.value) + ")");
            throw UnsupportedSeries(
                "adversarial data with eigenvalue ratio growing without bound is outside the "
                "certified universe");
        }
        adv_lower = s1.lower_bound() + (s2 ? s2->lower_bound() : 0.0);
        if (adv_lower <= 0.0) {
            FormLimit lim = form_limit(adv.spectrum.tail_form() / den.dom);
            if (lim.kind != FormLimitKind::Zero)
                return diverges("adversarial subsequence: terms do not vanish");
            throw UnsupportedSeries(
                "adversarial data against an unrelated decaying denominator is outside the "
                "certified universe");
        }
    }

    // --- certified value ---
    // Support values override continuations and are summed exactly wherever
    // they sit; the power tail is summed over its own range (minus support
    // overrides); the non-materialized adversarial remainder is covered by a
    // geometric bracket.
    CertSum acc;
    for (const auto& [i, v] : d.support()) {
        if (v != 0.0) acc.add(v * v / den_exact(i));
    }

    Enclosure tail_part{0.0, 0.0};
    std::string rule = "finite support";
    if (d.tail()) {
        std::int64_t start = d.tail()->start;
        std::int64_t n = std::max<std::int64_t>(
            {tail_cutoff(), start, s1.prefix_size(), s2 ? s2->prefix_size() : 0});
        auto sup_it = std::lower_bound(
            d.support().begin(), d.support().end(), start,
            [](const auto& p, std::int64_t key) { return p.first < key; });
        for (std::int64_t i = start; i <= n; ++i) {
            while (sup_it != d.support().end() && sup_it->first < i) ++sup_it;
            if (sup_it != d.support().end() && sup_it->first == i) continue;  // override counted above
            double c = d.tail()->scale * std::pow(static_cast<double>(i), -d.tail()->exponent);
            acc.add(c * c / den_exact(i));
        }
        GrowthForm q = num / den.dom;
        Enclosure raw = form_tail_bracket(q, n);
        double eps = den.exact ? 0.0 : form_sup_beyond(den.sub / den.dom, n);
        tail_part = {raw.lo / (1.0 + eps), raw.hi};
        // support overrides past the cutoff displace their formula terms
        for (const auto& [i, v] : d.support()) {
            if (i > n) {
                double c = d.tail()->scale * std::pow(static_cast<double>(i), -d.tail()->exponent);
                double term = c * c / den_exact(i);
                tail_part.lo -= term;
                tail_part.hi -= term;
            }
        }
        tail_part.lo = std::max(0.0, tail_part.lo);
        rule = "power-decay terms (integral tail bounds)";
    }
    if (d.adversarial()) {
        const AdversarialTail& adv = *d.adversarial();
        double remainder =
            adv.delta * adv.delta * std::exp2(1.0 - static_cast<double>(adv.next_k)) / adv_lower;
        tail_part = tail_part + Enclosure{0.0, remainder};
        rule = "adversarial remainder under a denominator lower bound";
    }

    Enclosure total{acc.sum() + tail_part.lo, acc.sum() + tail_part.hi};
    return verdict_from(total, acc.terms(), rule);
}

}  // namespace detail

inline SeriesVerdict classify_series(const TermModel& model) {
    return std::visit(
        [](const auto& t) -> SeriesVerdict {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, terms::SpectrumTerms>)
                return detail::classify_spectrum_terms(t);
            else if constexpr (std::is_same_v<T, terms::RatioTerms>)
                return detail::classify_ratio_terms(t);
            else if constexpr (std::is_same_v<T, terms::Log1pRatioTerms>)
                return detail::classify_log1p_ratio_terms(t);
            else if constexpr (std::is_same_v<T, terms::QuadOverSpectraTerms>)
                return detail::classify_quad(t);
            else
                return detail::classify_equiv_terms(t);
        },
        model.variant());
}

// ---------------------------------------------------------------------------
// Operations built on the classifier.
// ---------------------------------------------------------------------------

// A certified extended value: enclosure midpoint plus bracket width when
// finite; certificate of the deciding rule either way.
struct CertifiedExt {
    ExtReal value = ExtReal::finite(0.0);
    double bracket_width = 0.0;
    std::string certificate;
};

// Eigenvalue sum of the spectrum: exact geometric closed form, +inf for
// constant or slowly decaying power families, otherwise partial sum plus
// integral tail enclosure.
inline CertifiedExt trace(const SpectrumModel& s) {
    SeriesVerdict v = classify_series(TermModel::spectrum_terms(s));
    if (!v.converges) return {ExtReal::pos_infinity(), 0.0, v.certificate};
    return {ExtReal::finite(v.value), v.bracket_width, v.certificate};
}

inline double lower_bound(const SpectrumModel& s) { return s.lower_bound(); }

struct CertifiedValue {
    double value = 0.0;
    double bracket_width = 0.0;
};

// Squared Hilbert norm |x|^2; always finite inside the closed universe.
inline CertifiedValue norm_sq_certified(const CoeffSeq& x) {
    SeriesVerdict v =
        classify_series(TermModel::quad_over_spectra(x, SpectrumModel::constant(1.0)));
    if (!v.converges) throw UnsupportedSeries("squared norm classified divergent: " + v.certificate);
    return {v.value, v.bracket_width};
}

inline double norm_sq(const CoeffSeq& x) { return norm_sq_certified(x).value; }

// Weighted squared norm |x|^2_{S^{-1}} = sum x_i^2 / s_i, extended by +inf
// exactly when x falls outside the image of S^(1/2).
inline CertifiedExt weighted_norm_sq_certified(const CoeffSeq& x, const SpectrumModel& s) {
    SeriesVerdict v = classify_series(TermModel::quad_over_spectra(x, s));
    if (!v.converges) return {ExtReal::pos_infinity(), 0.0, v.certificate};
    return {ExtReal::finite(v.value), v.bracket_width, v.certificate};
}

inline ExtReal weighted_norm_sq(const CoeffSeq& x, const SpectrumModel& s) {
    return weighted_norm_sq_certified(x, s).value;
}

}  // namespace spectral_da
