#pragma once

#include "shiftdyn/scalar.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

namespace shiftdyn {

// ---------------------------------------------------------------------------
// WeightSequence: finitely described bi-infinite weight sequence.
//
// Layout on the index line:
//   n <  core_start                 : left_tail, applied leftward cyclically
//                                     (w[core_start-1] = left_tail.back())
//   core_start <= n < core_end      : core[n - core_start]
//   n >= core_end                   : right_tail, rightward cyclically
// Every stored scalar must be nonzero.
// ---------------------------------------------------------------------------

template <class S>
class WeightSequence {
  public:
    using real_t = real_of<S>;

    WeightSequence(std::vector<S> left_tail, Index core_start, std::vector<S> core,
                   std::vector<S> right_tail)
        : left_(std::move(left_tail)),
          core_(std::move(core)),
          right_(std::move(right_tail)),
          core_start_(core_start) {
        if (left_.empty() || right_.empty())
            throw std::invalid_argument("weight sequence: tails must be nonempty");
        auto check = [](const std::vector<S>& v) {
            for (const auto& x : v)
                if (abs_of(x) == real_of<S>(0))
                    throw std::invalid_argument("weight sequence: zero weight");
        };
        check(left_);
        check(core_);
        check(right_);
    }

    /// Constant bilateral sequence.
    static WeightSequence constant(const S& v) { return WeightSequence({v}, 0, {}, {v}); }

    S at(Index n) const {
        if (n >= core_end()) {
            return right_[static_cast<std::size_t>((n - core_end()) % period_right())];
        }
        if (n >= core_start_) {
            return core_[static_cast<std::size_t>(n - core_start_)];
        }
        Index d = core_start_ - 1 - n;  // distance back from the core edge
        return left_[static_cast<std::size_t>(period_left() - 1 - (d % period_left()))];
    }

    /// Product w_i * w_{i+1} * ... * w_j. Exact for rational weights.
    S product(Index i, Index j) const {
        if (i > j) throw std::invalid_argument("partial_product: i > j");
        S p(1);
        for (Index n = i; n <= j; ++n) p *= at(n);
        return p;
    }

    /// Same, with the empty product (i > j) equal to 1.
    S product_or_one(Index i, Index j) const { return i > j ? S(1) : product(i, j); }

    Index core_start() const { return core_start_; }
    Index core_end() const { return core_start_ + static_cast<Index>(core_.size()); }
    Index period_left() const { return static_cast<Index>(left_.size()); }
    Index period_right() const { return static_cast<Index>(right_.size()); }
    const std::vector<S>& left_tail() const { return left_; }
    const std::vector<S>& core() const { return core_; }
    const std::vector<S>& right_tail() const { return right_; }

    real_t min_abs() const {
        real_t m = abs_of(left_[0]);
        for_each_stored([&](const S& x) { m = std::min(m, abs_of(x)); });
        return m;
    }
    real_t max_abs() const {
        real_t m = abs_of(left_[0]);
        for_each_stored([&](const S& x) { m = std::max(m, abs_of(x)); });
        return m;
    }

    /// Relabeled sequence w'(n) = w(n + offset).
    WeightSequence shifted(Index offset) const {
        return WeightSequence(left_, core_start_ - offset, core_, right_);
    }

    /// Reversed sequence w~(n) = w(-n) (swaps the two tails).
    WeightSequence reversed() const {
        return resample([&](Index n) { return at(-n); }, 1 - core_end(),
                        static_cast<Index>(core_.size()), period_right(), period_left());
    }

    /// The conjugate of the inverse shift: w''(n) = 1 / w(-n + 1).
    WeightSequence reversed_inverted() const {
        return resample([&](Index n) { return S(1) / at(-n + 1); }, 2 - core_end(),
                        static_cast<Index>(core_.size()), period_right(), period_left());
    }

  private:
    template <class F>
    void for_each_stored(F f) const {
        for (const auto& x : left_) f(x);
        for (const auto& x : core_) f(x);
        for (const auto& x : right_) f(x);
    }

    template <class F>
    static WeightSequence resample(F value_at, Index new_start, Index core_len,
                                   Index left_period, Index right_period) {
        std::vector<S> l, c, r;
        for (Index i = new_start - left_period; i < new_start; ++i) l.push_back(value_at(i));
        for (Index i = new_start; i < new_start + core_len; ++i) c.push_back(value_at(i));
        for (Index i = new_start + core_len; i < new_start + core_len + right_period; ++i)
            r.push_back(value_at(i));
        return WeightSequence(std::move(l), new_start, std::move(c), std::move(r));
    }

    std::vector<S> left_, core_, right_;
    Index core_start_;
};

template <class S>
S weight_at(const WeightSequence<S>& w, Index n) {
    return w.at(n);
}

/// w_i * w_{i+1} * ... * w_j (requires i <= j).
template <class S>
S partial_product(const WeightSequence<S>& w, Index i, Index j) {
    return w.product(i, j);
}

// ---------------------------------------------------------------------------
// GeometricRate: exact representation of |p1 * ... * p_len|^(1/len).
// All decisions reduce to comparisons of integer powers, so rational inputs
// are decided exactly even when the rate itself is irrational.
// ---------------------------------------------------------------------------

template <class R>
struct GeometricRate {
    R prod;   // magnitude of the underlying product, >= 0
    Index len;

    double value() const { return std::pow(approx(prod), 1.0 / static_cast<double>(len)); }

    GeometricRate reciprocal() const { return {R(1) / prod, len}; }

    CmpOne versus_one(const Tolerance& tol) const {
        if constexpr (std::is_same_v<R, Rational>) {
            (void)tol;
            return cmp_one(prod, tol);
        } else {
            return cmp_one(value(), tol);
        }
    }

    /// Exact three-way comparison against another rate.
    int compare(const GeometricRate& o) const {
        R lhs = pow_int(prod, static_cast<unsigned>(o.len));
        R rhs = pow_int(o.prod, static_cast<unsigned>(len));
        if (lhs < rhs) return -1;
        if (lhs > rhs) return 1;
        return 0;
    }

    /// Exact three-way comparison against a nonnegative value of R.
    int compare_value(const R& q) const {
        R rhs = pow_int(q, static_cast<unsigned>(len));
        if (prod < rhs) return -1;
        if (prod > rhs) return 1;
        return 0;
    }
};

template <class R>
struct TailRates {
    GeometricRate<R> left;
    GeometricRate<R> right;
};

template <class S>
TailRates<real_of<S>> tail_rates(const WeightSequence<S>& w) {
    using R = real_of<S>;
    auto period_rate = [](const std::vector<S>& tail) {
        R p(1);
        for (const auto& x : tail) p *= abs_of(x);
        return GeometricRate<R>{p, static_cast<Index>(tail.size())};
    };
    return {period_rate(w.left_tail()), period_rate(w.right_tail())};
}

// ---------------------------------------------------------------------------
// finite_sup_geomean: exact sup/inf of the n-step geometric mean
// |w_k ... w_{k+n-1}|^(1/n) over the stated k-range. Since the sequence is
// eventually periodic on both sides, the extremum over infinitely many k is
// attained inside a finite scan window (one full period beyond the core on
// each side plus n), so the result is exact.
// ---------------------------------------------------------------------------

enum class GeomeanDomain { allZ_sup, allZ_inf, leftN_sup, rightN_inf };

template <class S>
GeometricRate<real_of<S>> finite_sup_geomean(const WeightSequence<S>& w, Index n,
                                             GeomeanDomain domain) {
    using R = real_of<S>;
    if (n < 1) throw std::invalid_argument("finite_sup_geomean: n must be >= 1");
    const Index cs = w.core_start(), ce = w.core_end();
    Index lo, hi;
    bool want_sup;
    switch (domain) {
        case GeomeanDomain::allZ_sup:
        case GeomeanDomain::allZ_inf:
            lo = cs - n - w.period_left();
            hi = ce + w.period_right();
            want_sup = domain == GeomeanDomain::allZ_sup;
            break;
        case GeomeanDomain::leftN_sup:
            // windows fully inside {.., -2, -1}: start k <= -n
            hi = -n;
            lo = std::min(cs - n, hi) - w.period_left();
            want_sup = true;
            break;
        case GeomeanDomain::rightN_inf:
            lo = 1;
            hi = std::max<Index>(1, ce) + w.period_right();
            want_sup = false;
            break;
        default:
            throw std::invalid_argument("finite_sup_geomean: bad domain");
    }
    R prod(1);
    for (Index i = lo; i < lo + n; ++i) prod *= abs_of(w.at(i));
    R best = prod;
    for (Index k = lo + 1; k <= hi; ++k) {
        prod = prod / abs_of(w.at(k - 1)) * abs_of(w.at(k + n - 1));
        if (want_sup ? (prod > best) : (prod < best)) best = prod;
    }
    return {best, n};
}

// ---------------------------------------------------------------------------
// Certified geometric envelopes. Each returns the smallest constant C >= 1
// with  value(window) <= C * t^len  over the full infinite family; the scan
// window is finite because one extra tail period multiplies the ratio by
// rho/t^P <= 1 (the caller guarantees t dominates the relevant tail rate).
// ---------------------------------------------------------------------------

namespace detail {

template <class R>
void take_max(R& acc, const R& v) {
    if (v > acc) acc = v;
}

}  // namespace detail

/// Envelope for |w_e w_{e-1} ... w_{e-k+1}| <= C t^k over all windows of
/// length k >= 1 ending at e <= end_max. Requires t >= g_left.
template <class S>
real_of<S> left_decay_envelope(const WeightSequence<S>& w, Index end_max, const real_of<S>& t) {
    using R = real_of<S>;
    const Index cs = w.core_start(), pl = w.period_left();
    R best(1);
    const Index e_lo = std::min(cs, end_max + 1) - pl;
    for (Index e = e_lo; e <= end_max; ++e) {
        const Index kmax = std::max<Index>(1, e - cs + 1) + pl;
        R prod(1), tp(1);
        for (Index k = 1; k <= kmax; ++k) {
            prod *= abs_of(w.at(e - k + 1));
            tp *= t;
            detail::take_max(best, R(prod / tp));
        }
    }
    return best;
}

/// Envelope for 1/|w_s w_{s+1} ... w_{s+k-1}| <= C t^k over all windows of
/// length k >= 1 starting at s >= start_min. Requires t >= 1/g_right.
template <class S>
real_of<S> right_growth_envelope(const WeightSequence<S>& w, Index start_min,
                                 const real_of<S>& t) {
    using R = real_of<S>;
    const Index ce = w.core_end(), pr = w.period_right();
    R best(1);
    const Index s_hi = std::max(ce, start_min) + pr;
    for (Index s = start_min; s <= s_hi; ++s) {
        const Index kmax = std::max<Index>(1, ce - s + 1) + pr;
        R prod(1), tp(1);
        for (Index k = 1; k <= kmax; ++k) {
            prod *= abs_of(w.at(s + k - 1));
            tp *= t;
            detail::take_max(best, R(R(1) / prod / tp));
        }
    }
    return best;
}

namespace detail {

// Envelope over windows confined to a single periodic tail, and over core
// subwindows; combined they certify a global product envelope.
template <class S>
real_of<S> periodic_envelope(const std::vector<S>& period, const real_of<S>& t, bool reciprocal) {
    using R = real_of<S>;
    const Index p = static_cast<Index>(period.size());
    R best(1);
    for (Index phase = 0; phase < p; ++phase) {
        R prod(1), tp(1);
        for (Index k = 1; k <= p; ++k) {
            prod *= abs_of(period[static_cast<std::size_t>((phase + k - 1) % p)]);
            tp *= t;
            R v = reciprocal ? R(R(1) / prod / tp) : R(prod / tp);
            take_max(best, v);
        }
    }
    return best;
}

template <class S>
real_of<S> core_envelope(const WeightSequence<S>& w, const real_of<S>& t, bool reciprocal) {
    using R = real_of<S>;
    R best(1);
    const Index cs = w.core_start(), ce = w.core_end();
    for (Index i = cs; i < ce; ++i) {
        R prod(1), tp(1);
        for (Index j = i; j < ce; ++j) {
            prod *= abs_of(w.at(j));
            tp *= t;
            R v = reciprocal ? R(R(1) / prod / tp) : R(prod / tp);
            take_max(best, v);
        }
    }
    return best;
}

}  // namespace detail

/// Envelope for |products over arbitrary windows| <= C t^k (all of Z).
/// Requires t >= max(g_left, g_right). A window splits into a left-tail
/// part, a core part and a right-tail part; each factor is certified
/// separately, so C is valid though not sharp.
template <class S>
real_of<S> global_decay_envelope(const WeightSequence<S>& w, const real_of<S>& t) {
    using R = real_of<S>;
    R c = detail::periodic_envelope(w.left_tail(), t, false);
    c *= detail::core_envelope(w, t, false);
    c *= detail::periodic_envelope(w.right_tail(), t, false);
    return std::max(R(1), c);
}

/// Envelope for reciprocals of arbitrary window products.
/// Requires t >= max(1/g_left, 1/g_right).
template <class S>
real_of<S> global_growth_envelope(const WeightSequence<S>& w, const real_of<S>& t) {
    using R = real_of<S>;
    R c = detail::periodic_envelope(w.left_tail(), t, true);
    c *= detail::core_envelope(w, t, true);
    c *= detail::periodic_envelope(w.right_tail(), t, true);
    return std::max(R(1), c);
}

// ---------------------------------------------------------------------------
// Rate-dominating scalars: the smallest convenient representable value of R
// strictly admissible for the envelopes above.
// ---------------------------------------------------------------------------

namespace detail {

// A value of R with r >= rate (exactly rate when the rate is directly
// representable, i.e. a one-period tail) and r < 1.  `pred` receives
// candidate values and must hold at the result.
template <class R>
R dominating_value(const std::vector<GeometricRate<R>>& rates) {
    // pick the largest rate
    std::size_t im = 0;
    for (std::size_t i = 1; i < rates.size(); ++i)
        if (rates[i].compare(rates[im]) > 0) im = i;
    const auto& top = rates[im];
    if (top.len == 1) return top.prod;
    if constexpr (std::is_same_v<R, Rational>) {
        double gd = top.value();
        double target = gd + (1.0 - gd) * 0.25;
        if (!(target < 1.0)) target = (gd + 1.0) / 2.0;
        unsigned denom = 1u << 14;
        while (denom < (1u << 30) && 8.0 / denom > (1.0 - gd)) denom <<= 1;
        return rational_at_least(
            target,
            [&](const Rational& s) {
                if (s >= 1) return false;
                for (const auto& r : rates)
                    if (r.compare_value(s) >= 0) return false;
                return true;
            },
            denom);
    } else {
        double gd = top.value();
        return gd + (1.0 - gd) * 0.25;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// DichotomyConstants: (beta, s) with
//   |w_{-j} ... w_{-j-k+1}|      <= beta s^k   (j, k >= 1)
//   1 / |w_j ... w_{j+k-1}|      <= beta s^k   (j, k >= 1)
// plus the one-sided contraction pair (c, t) with
//   |products ending at <= 0|    <= c t^k      (backward-invariant side)
//   reciprocals starting at >= 2 <= c t^k      (forward-invariant side).
// Only meaningful when g_left < 1 < g_right.
// ---------------------------------------------------------------------------

template <class R>
struct DichotomyConstants {
    R beta;  // > 1
    R s;     // in (0, 1)
    R c;     // >= 1
    R t;     // in (0, 1)
};

namespace detail {

template <class R>
R inflate_above_one(const R& sharp) {
    const R eps = R(1) / R(1 << 20);
    return sharp > 1 ? sharp : R(1) + eps;
}

}  // namespace detail

/// Requires the two-sided splitting regime (g_left < 1 < g_right); callers
/// classify first. Throws std::domain_error otherwise.
template <class S>
DichotomyConstants<real_of<S>> dichotomy_constants(const WeightSequence<S>& w,
                                                   const Tolerance& tol = {}) {
    using R = real_of<S>;
    auto rates = tail_rates(w);
    if (rates.left.versus_one(tol) != CmpOne::below || rates.right.versus_one(tol) != CmpOne::above)
        throw std::domain_error(
            "dichotomy_constants: weights are not in the split regime (g_left < 1 < g_right)");
    R s = detail::dominating_value<R>({rates.left, rates.right.reciprocal()});
    R beta =
        std::max(left_decay_envelope(w, -1, s), right_growth_envelope(w, 1, s));
    beta = detail::inflate_above_one(beta);
    R c = std::max({R(1), left_decay_envelope(w, 0, s), right_growth_envelope(w, 2, s)});
    return {beta, s, c, s};
}

/// Contraction constants (c, t) for the shadowing series, valid for the
/// class the weights are in:
///   decaying   (both rates < 1): ||B^n x|| <= c t^n ||x||        (all x)
///   expanding  (both rates > 1): ||B^{-n} x|| <= c t^n ||x||     (all x)
///   split      (left < 1 < right): restricted norms as above.
enum class RateRegime { decaying, expanding, split };

template <class R>
struct ContractionConstants {
    R c;
    R t;
    RateRegime regime;
};

template <class S>
ContractionConstants<real_of<S>> contraction_constants(const WeightSequence<S>& w,
                                                       RateRegime regime,
                                                       const Tolerance& tol = {}) {
    using R = real_of<S>;
    auto rates = tail_rates(w);
    switch (regime) {
        case RateRegime::decaying: {
            R t = detail::dominating_value<R>({rates.left, rates.right});
            return {global_decay_envelope(w, t), t, regime};
        }
        case RateRegime::expanding: {
            R t = detail::dominating_value<R>({rates.left.reciprocal(), rates.right.reciprocal()});
            return {global_growth_envelope(w, t), t, regime};
        }
        case RateRegime::split: {
            auto d = dichotomy_constants(w, tol);
            return {d.c, d.t, regime};
        }
    }
    throw std::invalid_argument("contraction_constants: bad regime");
}

// ---------------------------------------------------------------------------
// Unilateral sequences (indices 1, 2, 3, ...) and the summability report.
// ---------------------------------------------------------------------------

template <class S>
struct UnilateralWeights {
    std::vector<S> head;  // values at 1 .. head.size()
    std::vector<S> tail;  // periodic from head.size()+1 on; nonempty

    UnilateralWeights(std::vector<S> h, std::vector<S> t)
        : head(std::move(h)), tail(std::move(t)) {
        if (tail.empty()) throw std::invalid_argument("unilateral weights: empty tail");
        for (const auto& x : head)
            if (abs_of(x) == real_of<S>(0)) throw std::invalid_argument("zero weight");
        for (const auto& x : tail)
            if (abs_of(x) == real_of<S>(0)) throw std::invalid_argument("zero weight");
    }

    S at(Index n) const {
        if (n < 1) throw std::invalid_argument("unilateral weights: index must be >= 1");
        const Index h = static_cast<Index>(head.size());
        if (n <= h) return head[static_cast<std::size_t>(n - 1)];
        return tail[static_cast<std::size_t>((n - h - 1) % static_cast<Index>(tail.size()))];
    }

    GeometricRate<real_of<S>> rate() const {
        real_of<S> p(1);
        for (const auto& x : tail) p *= abs_of(x);
        return {p, static_cast<Index>(tail.size())};
    }
};

/// The restriction of a bilateral sequence to indices n >= 1.
template <class S>
UnilateralWeights<S> unilateral_part(const WeightSequence<S>& w) {
    const Index a = std::max<Index>(w.core_end(), 1);
    std::vector<S> head;
    for (Index n = 1; n < a; ++n) head.push_back(w.at(n));
    const Index pr = w.period_right();
    std::vector<S> tail;
    for (Index i = 0; i < pr; ++i) tail.push_back(w.at(a + i));
    return UnilateralWeights<S>(std::move(head), std::move(tail));
}

template <class R>
struct UnilateralSumsReport {
    R q2;              // min over n <= horizon of sup_k |w_k ... w_{k+n-1}|
    Index q2_n;        // the n attaining q2
    std::optional<R> q3;  // sup_k sum_{n>=0} |w_k ... w_{k+n}|; nullopt = divergent
    std::optional<R> q4;  // sup_k sum_{n=0}^{k-1} |w_k ... w_{k-n}|; nullopt = divergent
    bool decision_i;   // period geometric mean < 1
    bool decision_ii;  // some n has sup_k |w_k ... w_{k+n-1}| < 1 (exact, horizon-independent)
    bool decision_iii;
    bool decision_iv;
    bool boundary;     // a decisive comparison landed in the tolerance band (float mode)
};

namespace detail {

// sup over k >= 1 of |w_k ... w_{k+n-1}|; exact finite scan.
template <class S>
real_of<S> unilateral_sup_product(const UnilateralWeights<S>& w, Index n) {
    using R = real_of<S>;
    const Index h = static_cast<Index>(w.head.size());
    const Index p = static_cast<Index>(w.tail.size());
    const Index k_hi = h + p + 1;
    R prod(1);
    for (Index i = 1; i <= n; ++i) prod *= abs_of(w.at(i));
    R best = prod;
    for (Index k = 2; k <= k_hi; ++k) {
        prod = prod / abs_of(w.at(k - 1)) * abs_of(w.at(k + n - 1));
        take_max(best, prod);
    }
    return best;
}

}  // namespace detail

/// Summability report behind the four equivalent one-sided conditions.
/// q3 and q4 are computed in closed form through the affine one-period
/// recurrences, so the suprema are exact and the certified tail is zero;
/// divergence is certified by the period product being >= 1.
template <class S>
UnilateralSumsReport<real_of<S>> unilateral_sums(const UnilateralWeights<S>& w, Index horizon,
                                                 const Tolerance& tol = {}) {
    using R = real_of<S>;
    if (horizon < 1) throw std::invalid_argument("unilateral_sums: horizon must be >= 1");
    UnilateralSumsReport<R> rep{};
    const auto rate = w.rate();
    const auto rc = rate.versus_one(tol);
    rep.boundary = rc == CmpOne::equal_or_boundary && !scalar_traits<S>::is_exact;
    rep.decision_i = rc == CmpOne::below;

    // q2 and decision (ii).  If the period product is >= 1, the product of
    // the P phase-aligned windows of any length n equals rho^n >= 1, so some
    // phase has product >= 1: no n can work and the scan is skipped.
    rep.q2 = detail::unilateral_sup_product(w, 1);
    rep.q2_n = 1;
    for (Index n = 2; n <= horizon; ++n) {
        R sup = detail::unilateral_sup_product(w, n);
        if (sup < rep.q2) {
            rep.q2 = sup;
            rep.q2_n = n;
        }
    }
    if (rep.decision_i) {
        if (rep.q2 < 1) {
            rep.decision_ii = true;
        } else {
            // extend past the horizon; termination certified by the decay
            // envelope of the tail
            Index n = horizon;
            const Index n_cap = 64 * (static_cast<Index>(w.head.size()) +
                                      static_cast<Index>(w.tail.size()) + 4) + 4096;
            rep.decision_ii = false;
            while (++n <= n_cap) {
                if (detail::unilateral_sup_product(w, n) < 1) {
                    rep.decision_ii = true;
                    break;
                }
            }
            if (!rep.decision_ii)
                throw numeric_failure("unilateral_sums: (ii)-scan cap exceeded");
        }
    } else {
        rep.decision_ii = false;
    }

    const Index h = static_cast<Index>(w.head.size());
    const Index p = static_cast<Index>(w.tail.size());
    R rho(1);
    for (const auto& x : w.tail) rho *= abs_of(x);

    // q3: S_k = |w_k| (1 + S_{k+1}); periodic fixed points, then march the
    // head backward.  Finite iff rho < 1.
    if (rep.decision_i && !rep.boundary) {
        std::vector<R> sp(static_cast<std::size_t>(p));
        for (Index r = 0; r < p; ++r) {
            R prefix(1), c(0);
            for (Index m = 0; m < p; ++m) {
                prefix *= abs_of(w.tail[static_cast<std::size_t>((r + m) % p)]);
                c += prefix;
            }
            sp[static_cast<std::size_t>(r)] = c / (R(1) - rho);
        }
        R best = sp[0];
        for (const auto& v : sp) detail::take_max(best, v);
        R next = sp[0];  // S at index h+1
        for (Index k = h; k >= 1; --k) {
            R cur = abs_of(w.at(k)) * (R(1) + next);
            detail::take_max(best, cur);
            next = cur;
        }
        rep.q3 = best;
        rep.decision_iii = true;
    } else {
        rep.q3 = std::nullopt;
        rep.decision_iii = false;
    }

    // q4: R_1 = |w_1|, R_k = |w_k| (1 + R_{k-1}); in the periodic regime the
    // one-period map is affine R -> rho R + B_r, so the supremum is the max
    // of the transient values and the per-phase fixed points.
    {
        R cur(0);
        R best(0);
        std::vector<R> at_phase(static_cast<std::size_t>(p), R(0));
        for (Index k = 1; k <= h + p; ++k) {
            cur = abs_of(w.at(k)) * (R(1) + cur);
            detail::take_max(best, cur);
            if (k > h) at_phase[static_cast<std::size_t>(k - h - 1)] = cur;
        }
        bool diverges = !(rho < 1);
        if (!diverges && !rep.boundary) {
            // fixed point of one full period starting after phase r
            for (Index r = 0; r < p; ++r) {
                R a(1), b(0);
                for (Index m = 1; m <= p; ++m) {
                    R wv = abs_of(w.tail[static_cast<std::size_t>((r + m) % p)]);
                    b = wv * (R(1) + b);
                    a *= wv;
                }
                detail::take_max(best, R(b / (R(1) - a)));
            }
            rep.q4 = best;
            rep.decision_iv = true;
        } else {
            rep.q4 = std::nullopt;
            rep.decision_iv = false;
        }
    }
    return rep;
}

/// Summability report for the positive-index restriction of a bilateral
/// sequence.
template <class S>
UnilateralSumsReport<real_of<S>> unilateral_sums(const WeightSequence<S>& w, Index horizon,
                                                 const Tolerance& tol = {}) {
    return unilateral_sums(unilateral_part(w), horizon, tol);
}

}  // namespace shiftdyn
