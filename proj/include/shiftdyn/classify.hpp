#pragma once

#include "shiftdyn/spaces.hpp"

#include <optional>
#include <string>

namespace shiftdyn {

enum class ShadowingClass { A, B, C, none, boundary };
enum class UniformExpansivity { a, b, c, none, boundary };
enum class TriState { yes, no, boundary };

inline const char* to_string(ShadowingClass c) {
    switch (c) {
        case ShadowingClass::A: return "A";
        case ShadowingClass::B: return "B";
        case ShadowingClass::C: return "C";
        case ShadowingClass::none: return "NONE";
        default: return "BOUNDARY";
    }
}
inline const char* to_string(UniformExpansivity c) {
    switch (c) {
        case UniformExpansivity::a: return "a";
        case UniformExpansivity::b: return "b";
        case UniformExpansivity::c: return "c";
        case UniformExpansivity::none: return "none";
        default: return "boundary";
    }
}
inline const char* to_string(TriState t) {
    switch (t) {
        case TriState::yes: return "true";
        case TriState::no: return "false";
        default: return "boundary";
    }
}

template <class R>
struct ClassificationReport {
    ShadowingClass shadowing_class = ShadowingClass::none;
    TailRates<R> rates;
    TriState hyperbolic = TriState::no;
    UniformExpansivity uniform_expansivity = UniformExpansivity::none;
    double tolerance_used = 0;
    bool exact_arithmetic = false;
    std::string boundary_quantity;  // set when a decisive rate is within tolerance of 1
    double boundary_distance = 0;
};

// ---------------------------------------------------------------------------
// Shadowing classification. All decisions route through the two tail rates:
//   A:     max(g_left, g_right) < 1       (contracting, hyperbolic)
//   B:     min(g_left, g_right) > 1       (expanding, hyperbolic)
//   C:     g_left < 1 < g_right           (split; shadowing without
//                                          hyperbolicity)
//   NONE:  anything else (includes rates exactly equal to 1).
// In float mode a rate within tolerance of 1 yields BOUNDARY.
// ---------------------------------------------------------------------------

template <class S>
ClassificationReport<real_of<S>> classify_shadowing(const WeightSequence<S>& w,
                                                    const Tolerance& tol = {}) {
    using R = real_of<S>;
    ClassificationReport<R> rep;
    rep.rates = tail_rates(w);
    rep.tolerance_used = tol.rel;
    rep.exact_arithmetic = scalar_traits<S>::is_exact;

    const CmpOne cl = rep.rates.left.versus_one(tol);
    const CmpOne cr = rep.rates.right.versus_one(tol);
    const bool boundary = !rep.exact_arithmetic && (cl == CmpOne::equal_or_boundary ||
                                                    cr == CmpOne::equal_or_boundary);
    if (boundary) {
        rep.shadowing_class = ShadowingClass::boundary;
        rep.hyperbolic = TriState::boundary;
        rep.uniform_expansivity = UniformExpansivity::boundary;
        const bool left_off = cl == CmpOne::equal_or_boundary;
        rep.boundary_quantity = left_off ? "g_left" : "g_right";
        rep.boundary_distance =
            std::fabs((left_off ? rep.rates.left.value() : rep.rates.right.value()) - 1.0);
        return rep;
    }
    const bool ll = cl == CmpOne::below, lg = cl == CmpOne::above;
    const bool rl = cr == CmpOne::below, rg = cr == CmpOne::above;
    if (ll && rl)
        rep.shadowing_class = ShadowingClass::A;
    else if (lg && rg)
        rep.shadowing_class = ShadowingClass::B;
    else if (ll && rg)
        rep.shadowing_class = ShadowingClass::C;
    else
        rep.shadowing_class = ShadowingClass::none;

    rep.hyperbolic = (rep.shadowing_class == ShadowingClass::A ||
                      rep.shadowing_class == ShadowingClass::B)
                         ? TriState::yes
                         : TriState::no;

    if (ll && rl)
        rep.uniform_expansivity = UniformExpansivity::a;
    else if (lg && rg)
        rep.uniform_expansivity = UniformExpansivity::b;
    else if (lg && rl)
        rep.uniform_expansivity = UniformExpansivity::c;
    else
        rep.uniform_expansivity = UniformExpansivity::none;
    return rep;
}

template <class S>
UniformExpansivity uniform_expansivity_class(const WeightSequence<S>& w,
                                             const Tolerance& tol = {}) {
    return classify_shadowing(w, tol).uniform_expansivity;
}

/// The rate regime backing the splitting used by the shadowing series.
template <class S>
RateRegime regime_of(ShadowingClass cls) {
    switch (cls) {
        case ShadowingClass::A: return RateRegime::decaying;
        case ShadowingClass::B: return RateRegime::expanding;
        case ShadowingClass::C: return RateRegime::split;
        default: throw std::domain_error("no contraction regime outside classes A/B/C");
    }
}

// ---------------------------------------------------------------------------
// Unilateral positive-shadowing classification.
// Backward shift: positive shadowing iff the tail rate is < 1 (hyperbolic)
// or > 1 (expanding). Forward shift: iff the rate is < 1 only.
// ---------------------------------------------------------------------------

enum class UnilateralDirection { backward, forward };
enum class UnilateralClass { hyperbolic_A, expanding_b, none, boundary };

inline const char* to_string(UnilateralClass c) {
    switch (c) {
        case UnilateralClass::hyperbolic_A: return "hyperbolic_A";
        case UnilateralClass::expanding_b: return "expanding_b";
        case UnilateralClass::none: return "none";
        default: return "boundary";
    }
}

template <class S>
UnilateralClass classify_unilateral(const UnilateralWeights<S>& w, UnilateralDirection dir,
                                    const Tolerance& tol = {}) {
    const CmpOne c = w.rate().versus_one(tol);
    if (c == CmpOne::equal_or_boundary && !scalar_traits<S>::is_exact)
        return UnilateralClass::boundary;
    if (c == CmpOne::below) return UnilateralClass::hyperbolic_A;
    if (c == CmpOne::above && dir == UnilateralDirection::backward)
        return UnilateralClass::expanding_b;
    return UnilateralClass::none;
}

// ---------------------------------------------------------------------------
// Geometric-decay set membership (stable / unstable sets of 0).
// The scan is exact for n up to the periodic alignment; beyond it one tail
// period scales the orbit norm by exactly the period product, so the verdict
// is a true decision over all n, not a sample.
// ---------------------------------------------------------------------------

enum class OrbitSide { stable, unstable };

template <class R>
struct StableSetVerdict {
    bool member = false;
    std::optional<Index> violation_n;  // witness when not a member
    Index checked_to = 0;              // inequalities verified exhaustively up to here
    bool certified_beyond = false;     // periodic scaling covers all larger n
};

template <class S>
StableSetVerdict<real_of<S>> stable_set_member(const WeightSequence<S>& w,
                                               const SpaceSpec& space, const SeqVector<S>& x,
                                               const real_of<S>& c, const real_of<S>& beta,
                                               Index horizon, OrbitSide side) {
    using R = real_of<S>;
    if (horizon < 1) throw std::invalid_argument("stable_set_member: horizon must be >= 1");
    if (x.is_zero()) return {true, std::nullopt, horizon, true};

    const bool stable = side == OrbitSide::stable;
    const Index period = stable ? w.period_left() : w.period_right();
    // orbit support leaves the irregular region after `align` steps
    const Index align = stable ? std::max<Index>(1, x.hi() - w.core_start() + 1)
                               : std::max<Index>(1, w.core_end() - 1 - x.lo());
    // per-period scaling of the orbit norm once aligned
    R period_factor(1);
    if (stable)
        for (const auto& v : w.left_tail()) period_factor *= abs_of(v);
    else {
        for (const auto& v : w.right_tail()) period_factor *= abs_of(v);
        period_factor = R(1) / period_factor;
    }
    const R rhs_factor = pow_int(beta, static_cast<unsigned>(period));
    const bool ratio_shrinks = period_factor <= rhs_factor;

    const R x_norm = norm(space, x);
    StableSetVerdict<R> verdict;
    SeqVector<S> cur = x;
    R rhs = c * x_norm;
    Index n = 0;
    const Index n_first = std::max(horizon, align + period);
    const Index n_cap = n_first + period * 4096;
    while (true) {
        ++n;
        cur = stable ? apply_backward_shift(w, cur) : apply_backward_shift_inverse(w, cur);
        rhs *= beta;
        if (norm(space, cur) > rhs) {
            verdict.member = false;
            verdict.violation_n = n;
            verdict.checked_to = n;
            return verdict;
        }
        if (n >= n_first && ratio_shrinks) {
            verdict.member = true;
            verdict.checked_to = n;
            verdict.certified_beyond = true;
            return verdict;
        }
        if (n >= n_cap)
            throw numeric_failure("stable_set_member: scan cap exceeded without a decision");
    }
}

// ---------------------------------------------------------------------------
// bounded_orbit_witness: semi-decision searching for a unit vector whose
// two-sided orbit stays within `bound` for |n| <= horizon. A certificate of
// non-expansivity up to the horizon; absence proves nothing.
// ---------------------------------------------------------------------------

template <class S>
std::optional<SeqVector<S>> bounded_orbit_witness(const WeightSequence<S>& w,
                                                  const SpaceSpec& space, Index horizon,
                                                  const real_of<S>& bound) {
    using R = real_of<S>;
    auto orbit_bounded = [&](const SeqVector<S>& v) {
        const R vn = norm(space, v);
        const R cap = bound * vn;
        SeqVector<S> f = v, b = v;
        for (Index n = 1; n <= horizon; ++n) {
            f = apply_backward_shift(w, f);
            b = apply_backward_shift_inverse(w, b);
            if (norm(space, f) > cap || norm(space, b) > cap) return false;
        }
        return true;
    };
    auto normalized = [&](SeqVector<S> v) {
        if constexpr (scalar_traits<S>::is_exact) {
            if (space.is_sup() || space.is_l1()) {
                R n = norm(space, v);
                v.scale(S(R(1) / n));
            }
        } else {
            auto n = norm(space, v);
            v.scale(S(1) / S(n));
        }
        return v;
    };

    const Index lo = w.core_start() - w.period_left() - static_cast<Index>(w.core().size()) - 2;
    const Index hi = w.core_end() + w.period_right() + 2;
    // junction-outward order: witnesses live near the tail seam
    std::vector<Index> order;
    const Index center = w.core_start();
    for (Index r = 0; center - r >= lo || center + r <= hi; ++r) {
        if (center + r <= hi && center + r >= lo) order.push_back(center + r);
        if (r > 0 && center - r >= lo && center - r <= hi) order.push_back(center - r);
    }
    for (Index d : order) {
        auto v = SeqVector<S>::unit(d);
        if (orbit_bounded(v)) return normalized(v);
    }
    // two-term combinations on the core window
    for (Index i = lo; i <= hi; ++i) {
        for (Index j = i + 1; j <= hi; ++j) {
            for (int sign : {1, -1}) {
                SeqVector<S> v = SeqVector<S>::unit(i);
                v.axpy(S(sign), SeqVector<S>::unit(j));
                if (orbit_bounded(v)) return normalized(v);
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Frequent-hypercyclicity criterion check: certified convergence of the
// forward and inverse orbit series of a finitely supported vector.
//
// Once the orbit support is aligned with a periodic tail, advancing a full
// period scales every coordinate magnitude by the same exact factor, so the
// remainder past a block boundary is an exact geometric series of block
// sums. Convergence of the forward series requires g_left < 1 and of the
// backward series g_right > 1.
// ---------------------------------------------------------------------------

template <class R>
struct FhcSeries {
    R partial_sum{};
    R tail_bound{};
    Index terms = 0;
    bool converges = false;
};

template <class R>
struct FhcReport {
    FhcSeries<R> forward;
    FhcSeries<R> backward;
    R tail_bound{};
    bool converges = false;
    bool boundary = false;
};

namespace detail {

template <class S>
FhcSeries<real_of<S>> orbit_series(const WeightSequence<S>& w, const SpaceSpec& space,
                                   const SeqVector<S>& y, bool forward, double tail_target,
                                   const Tolerance& tol) {
    using R = real_of<S>;
    FhcSeries<R> out;
    if (y.is_zero()) {
        out.converges = true;
        return out;
    }
    auto rates = tail_rates(w);
    const CmpOne cmp = forward ? rates.left.versus_one(tol) : rates.right.versus_one(tol);
    const bool ok = forward ? cmp == CmpOne::below : cmp == CmpOne::above;
    const Index period = forward ? w.period_left() : w.period_right();
    R factor(1);
    if (forward)
        for (const auto& v : w.left_tail()) factor *= abs_of(v);
    else {
        for (const auto& v : w.right_tail()) factor *= abs_of(v);
        factor = R(1) / factor;
    }
    const Index align = forward ? std::max<Index>(1, y.hi() - w.core_start() + 1)
                                : std::max<Index>(1, w.core_end() - 1 - y.lo());

    std::vector<R> block(static_cast<std::size_t>(period));
    SeqVector<S> cur = y;
    Index k = 0;
    const Index k_min = align + period - 1;
    const Index k_cap = k_min + period * 100000;
    while (true) {
        ++k;
        cur = forward ? apply_backward_shift(w, cur) : apply_backward_shift_inverse(w, cur);
        R t = norm(space, cur);
        out.partial_sum += t;
        block[static_cast<std::size_t>(k % period)] = t;
        out.terms = k;
        if (!ok && k >= k_min) {
            // certified divergence: terms repeat scaled by factor >= 1
            out.converges = false;
            out.tail_bound = R(0);
            return out;
        }
        if (ok && k >= k_min) {
            R bsum(0);
            for (const auto& b : block) bsum += b;
            R tail = bsum * factor / (R(1) - factor);
            if (approx(tail) * 2.0 < tail_target) {
                out.converges = true;
                out.tail_bound = tail;
                return out;
            }
        }
        if (k >= k_cap) throw numeric_failure("fhc series: tail target unreachable");
    }
}

}  // namespace detail

template <class S>
FhcReport<real_of<S>> fhc_check(const WeightSequence<S>& w, const SpaceSpec& space,
                                const SeqVector<S>& y, double tail_target = 1e-9,
                                const Tolerance& tol = {}) {
    using R = real_of<S>;
    FhcReport<R> rep;
    auto rates = tail_rates(w);
    rep.boundary = !scalar_traits<S>::is_exact &&
                   (rates.left.versus_one(tol) == CmpOne::equal_or_boundary ||
                    rates.right.versus_one(tol) == CmpOne::equal_or_boundary);
    rep.forward = detail::orbit_series(w, space, y, true, tail_target, tol);
    rep.backward = detail::orbit_series(w, space, y, false, tail_target, tol);
    rep.tail_bound = std::max(rep.forward.tail_bound, rep.backward.tail_bound);
    rep.converges = rep.forward.converges && rep.backward.converges && !rep.boundary;
    return rep;
}

}  // namespace shiftdyn
