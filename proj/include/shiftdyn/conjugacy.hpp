#pragma once

#include "shiftdyn/shadowing.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace shiftdyn {

// ---------------------------------------------------------------------------
// PerturbationMap: a bounded Lipschitz map with finite output support and
// declared sup / Lipschitz bounds. The coordinate series only ever samples
// finitely many output coordinates, so finite output support turns every
// series into a finite sum plus a certified geometric tail.
// ---------------------------------------------------------------------------

template <class S>
struct PerturbationMap {
    enum class Kind { constant, coordinate_rank_one, cutoff_affine, custom };
    using real_t = real_of<S>;

    Kind kind = Kind::custom;
    SpaceSpec space;  // norm backing radial cutoffs and declared bounds
    Index window_lo = 0, window_hi = -1;  // output support (empty if lo > hi)
    real_t sup_bound{};
    real_t lip_bound{};

    // constant / rank-one data
    SeqVector<S> vec;            // constant value or rank-one direction
    Index functional_index = 0;  // rank-one: coordinate driving the map
    S gain{};                    // rank-one gain

    // cutoff_affine data: rows indexed [row_lo ..], columns [col_lo ..]
    Index row_lo = 0, col_lo = 0;
    std::vector<std::vector<S>> matrix;
    SeqVector<S> offset;

    std::function<SeqVector<S>(const SeqVector<S>&)> fn;  // custom

    /// alpha(x) = v, constant.
    static PerturbationMap constant(SeqVector<S> v, const SpaceSpec& space) {
        PerturbationMap m;
        m.kind = Kind::constant;
        m.space = space;
        m.vec = std::move(v);
        m.sup_bound = norm(space, m.vec);
        m.lip_bound = real_t(0);
        if (!m.vec.is_zero()) {
            m.window_lo = m.vec.lo();
            m.window_hi = m.vec.hi();
        }
        return m;
    }

    /// alpha(x) = gain * clamp(x_i) * direction with clamp(t) = t / (1+|t|),
    /// which bounds the map by |gain| * ||direction|| with the same
    /// Lipschitz constant (coordinate functionals have norm 1).
    static PerturbationMap coordinate_rank_one(Index functional_index, SeqVector<S> direction,
                                               S gain, const SpaceSpec& space) {
        PerturbationMap m;
        m.kind = Kind::coordinate_rank_one;
        m.space = space;
        m.functional_index = functional_index;
        m.vec = std::move(direction);
        m.gain = std::move(gain);
        real_t scale = abs_of(m.gain) * norm(space, m.vec);
        m.sup_bound = scale;
        m.lip_bound = scale;
        if (!m.vec.is_zero()) {
            m.window_lo = m.vec.lo();
            m.window_hi = m.vec.hi();
        }
        return m;
    }

    /// alpha(x) = offset + rho(||x||) * A (x restricted to the column
    /// window), the radial cutoff of an affine map; rho is 1 on [0,1],
    /// 2 - t on [1,2] and 0 beyond, so Lip <= 3 ||A|| and the map agrees
    /// with the affine one on the unit ball.
    static PerturbationMap cutoff_affine(Index row_lo, Index col_lo,
                                         std::vector<std::vector<S>> matrix, SeqVector<S> offset,
                                         const SpaceSpec& space) {
        PerturbationMap m;
        m.kind = Kind::cutoff_affine;
        m.space = space;
        m.row_lo = row_lo;
        m.col_lo = col_lo;
        m.matrix = std::move(matrix);
        m.offset = std::move(offset);
        real_t row_sum(0), col_max(0);
        std::vector<real_t> col_sums;
        for (const auto& row : m.matrix) {
            real_t rs(0);
            if (col_sums.size() < row.size()) col_sums.resize(row.size(), real_t(0));
            for (std::size_t c = 0; c < row.size(); ++c) {
                rs += abs_of(row[c]);
                col_sums[c] += abs_of(row[c]);
            }
            row_sum = std::max(row_sum, rs);
        }
        for (const auto& cs : col_sums) col_max = std::max(col_max, cs);
        // max(row sum, col sum) dominates the operator norm for every p
        real_t a_norm = std::max(row_sum, col_max);
        m.sup_bound = norm(space, m.offset) + real_t(2) * a_norm;
        m.lip_bound = real_t(3) * a_norm;
        Index lo = row_lo, hi = row_lo + static_cast<Index>(m.matrix.size()) - 1;
        if (!m.offset.is_zero()) {
            lo = std::min(lo, m.offset.lo());
            hi = std::max(hi, m.offset.hi());
        }
        m.window_lo = lo;
        m.window_hi = hi;
        return m;
    }

    static PerturbationMap custom(std::function<SeqVector<S>(const SeqVector<S>&)> fn,
                                  Index window_lo, Index window_hi, real_t sup_bound,
                                  real_t lip_bound, const SpaceSpec& space) {
        PerturbationMap m;
        m.kind = Kind::custom;
        m.space = space;
        m.fn = std::move(fn);
        m.window_lo = window_lo;
        m.window_hi = window_hi;
        m.sup_bound = sup_bound;
        m.lip_bound = lip_bound;
        return m;
    }

    bool window_empty() const { return window_lo > window_hi; }

    SeqVector<S> eval(const SeqVector<S>& x) const {
        switch (kind) {
            case Kind::constant:
                return vec;
            case Kind::coordinate_rank_one: {
                S t = x.at(functional_index);
                if (t == S(0)) return {};
                S denom = scalar_from_real<S>(real_t(real_t(1) + abs_of(t)));
                SeqVector<S> out = vec;
                out.scale(gain * (t / denom));
                return out;
            }
            case Kind::cutoff_affine: {
                real_t n = norm(space, x);
                real_t rho = n <= real_t(1) ? real_t(1)
                                            : (n >= real_t(2) ? real_t(0) : real_t(real_t(2) - n));
                SeqVector<S> out = offset;
                if (rho == real_t(0)) return out;
                S rho_s = scalar_from_real<S>(rho);
                for (std::size_t r = 0; r < matrix.size(); ++r) {
                    S acc(0);
                    for (std::size_t c = 0; c < matrix[r].size(); ++c)
                        acc += matrix[r][c] * x.at(col_lo + static_cast<Index>(c));
                    if (!(acc == S(0)))
                        out.axpy(rho_s * acc, SeqVector<S>::unit(row_lo + static_cast<Index>(r)));
                }
                return out;
            }
            case Kind::custom:
                return fn(x);
        }
        return {};
    }
};

/// Radial-cutoff extension: agrees with alpha on the unit ball, is bounded
/// by ||alpha restricted to 2B|| and has Lipschitz constant at most 3 Lip.
template <class S>
PerturbationMap<S> extend_lipschitz(const PerturbationMap<S>& alpha) {
    using R = real_of<S>;
    const SpaceSpec space = alpha.space;
    SeqVector<S> a0 = alpha.eval(SeqVector<S>::zero());
    R sup2 = std::min(alpha.sup_bound, R(norm(space, a0) + R(2) * alpha.lip_bound));
    Index lo = alpha.window_lo, hi = alpha.window_hi;
    if (!a0.is_zero()) {
        lo = alpha.window_empty() ? a0.lo() : std::min(lo, a0.lo());
        hi = alpha.window_empty() ? a0.hi() : std::max(hi, a0.hi());
    }
    auto inner = alpha;  // copy for the closure
    auto fn = [inner, a0, space](const SeqVector<S>& x) {
        R n = norm(space, x);
        if (n <= R(1)) return inner.eval(x);
        if (n >= R(2)) return a0;
        R rho = R(2) - n;
        SeqVector<S> out = inner.eval(x);
        out -= a0;
        out.scale(scalar_from_real<S>(rho));
        out += a0;
        return out;
    };
    return PerturbationMap<S>::custom(fn, lo, hi, sup2, R(3) * alpha.lip_bound, space);
}

// ---------------------------------------------------------------------------
// Admissibility budget: perturbations must satisfy
// max(sup_bound, lip_bound) <= (1 - s) / (2 beta) * 1/2,
// half the certified bound on ||F^{-1}||^{-1}, so the fixed-point map is a
// contraction with rate at most 1/2.
// ---------------------------------------------------------------------------

template <class S>
real_of<S> epsilon_budget(const WeightSequence<S>& w, const SpaceSpec& /*space*/,
                          const Tolerance& tol = {}) {
    using R = real_of<S>;
    auto d = dichotomy_constants(w, tol);
    return (R(1) - d.s) / (R(2) * d.beta) / R(2);
}

// ---------------------------------------------------------------------------
// The coordinate series solving phi o B - B o phi = eta with phi_0 = 0:
//   phi_i    = - sum_{j=0}^{i-1} eta_j(B^{i-j-1} x) / (w_{j+1} ... w_i)
//   phi_{-i} = + sum_{j=1}^{i}   w_{-i+1} ... w_{-j} * eta_{-j}(B^{-i+j-1} x)
// truncated where the certified geometric tail drops below the tolerance.
// ---------------------------------------------------------------------------

template <class S>
struct SeriesResult {
    SeqVector<S> value;
    real_of<S> tail_bound{};  // covers the dropped coordinates even after one
                              // further shift application
};

namespace detail {

template <class R>
struct SeriesPlan {
    Index i_pos = 0;  // keep coordinates 1 .. i_pos
    Index i_neg = 0;  // keep coordinates -i_neg .. -1
    R tail{};         // certified norm bound on everything dropped
};

// Truncation depths: coordinate i > window_hi is bounded by
// beta * sup * s^(i - window_hi) / (1-s); summing the dropped coordinates
// gives another 1/(1-s). The final bound is inflated by max(1, M_w) so it
// still covers the series after one extra application of the shift.
template <class S>
SeriesPlan<real_of<S>> plan_series(const WeightSequence<S>& w,
                                   const DichotomyConstants<real_of<S>>& dich,
                                   const real_of<S>& sup_bound, Index window_lo, Index window_hi,
                                   double tol) {
    using R = real_of<S>;
    SeriesPlan<R> plan;
    if (window_lo > window_hi || sup_bound == R(0)) return plan;  // zero map
    const R unit = dich.beta * sup_bound / ((R(1) - dich.s) * (R(1) - dich.s));
    const R infl = std::max(R(1), w.max_abs());
    auto depth_for = [&](double target) {
        Index d = 1;
        R spow = dich.s;
        while (approx(R(infl * unit * spow)) >= target && d < 100000) {
            spow *= dich.s;
            ++d;
        }
        if (d >= 100000) throw numeric_failure("series truncation depth unreachable");
        return std::pair<Index, R>(d, infl * unit * spow);
    };
    auto [dp, tp] = depth_for(tol / 2);
    auto [dn, tn] = depth_for(tol / 2);
    plan.i_pos = std::max<Index>(0, window_hi) + dp;
    plan.i_neg = std::max<Index>(0, -window_lo) + dn;
    plan.tail = tp + tn;
    return plan;
}

// Assemble the series given coordinate access to eta along the orbit:
// eta_at(r, j) = j-th coordinate of eta at the r-th orbit point of x.
template <class S, class EtaAt>
SeqVector<S> series_from_coords(const WeightSequence<S>& w, const SeriesPlan<real_of<S>>& plan,
                                Index window_lo, Index window_hi, EtaAt&& eta_at) {
    SeqVector<S> out;
    if (plan.i_pos == 0 && plan.i_neg == 0) return out;
    // prefix products: pos[i] = w_1 ... w_i, neg[i] = w_0 w_{-1} ... w_{-i+1}
    std::vector<S> pos(static_cast<std::size_t>(plan.i_pos + 1), S(1));
    for (Index i = 1; i <= plan.i_pos; ++i)
        pos[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(i - 1)] * w.at(i);
    std::vector<S> neg(static_cast<std::size_t>(plan.i_neg + 1), S(1));
    for (Index i = 1; i <= plan.i_neg; ++i)
        neg[static_cast<std::size_t>(i)] = neg[static_cast<std::size_t>(i - 1)] * w.at(-i + 1);

    for (Index i = 1; i <= plan.i_pos; ++i) {
        S acc(0);
        const Index j_lo = std::max<Index>(0, window_lo);
        const Index j_hi = std::min<Index>(i - 1, window_hi);
        for (Index j = j_lo; j <= j_hi; ++j) {
            S v = eta_at(i - j - 1, j);
            if (v == S(0)) continue;
            acc += v * (pos[static_cast<std::size_t>(j)] / pos[static_cast<std::size_t>(i)]);
        }
        if (!(acc == S(0))) out.set(i, S(-acc));
    }
    for (Index i = 1; i <= plan.i_neg; ++i) {
        S acc(0);
        const Index j_lo = std::max<Index>(1, -window_hi);
        const Index j_hi = std::min<Index>(i, -window_lo);
        for (Index j = j_lo; j <= j_hi; ++j) {
            S v = eta_at(j - i - 1, -j);
            if (v == S(0)) continue;
            acc += v * (neg[static_cast<std::size_t>(i)] / neg[static_cast<std::size_t>(j)]);
        }
        if (!(acc == S(0))) out.set(-i, acc);
    }
    return out;
}

}  // namespace detail

/// Evaluate F^{-1}(eta) at x: the unique solution of
/// phi(B x) - B(phi(x)) = eta(x) with phi_0 = 0.
template <class S>
SeriesResult<S> f_inverse_eval(const WeightSequence<S>& w, const SpaceSpec& space,
                               const PerturbationMap<S>& eta, const SeqVector<S>& x, double tol,
                               const Tolerance& cmp_tol = {}) {
    (void)space;
    if (tol <= 0) throw std::invalid_argument("f_inverse_eval: tol must be > 0");
    auto dich = dichotomy_constants(w, cmp_tol);
    auto plan = detail::plan_series(w, dich, eta.sup_bound, eta.window_lo, eta.window_hi, tol);
    SeriesResult<S> out;
    out.tail_bound = plan.tail;
    if (plan.i_pos == 0 && plan.i_neg == 0) return out;

    // orbit points B^r x for r in [-i_neg, i_pos - 1], and eta along them
    const Index r_lo = -plan.i_neg, r_hi = plan.i_pos - 1;
    std::vector<SeqVector<S>> eta_on_orbit(static_cast<std::size_t>(r_hi - r_lo + 1));
    SeqVector<S> cur = x;
    eta_on_orbit[static_cast<std::size_t>(-r_lo)] = eta.eval(cur);
    SeqVector<S> fwd = x;
    for (Index r = 1; r <= r_hi; ++r) {
        fwd = apply_backward_shift(w, fwd);
        eta_on_orbit[static_cast<std::size_t>(r - r_lo)] = eta.eval(fwd);
    }
    SeqVector<S> bwd = x;
    for (Index r = -1; r >= r_lo; --r) {
        bwd = apply_backward_shift_inverse(w, bwd);
        eta_on_orbit[static_cast<std::size_t>(r - r_lo)] = eta.eval(bwd);
    }
    out.value = detail::series_from_coords(
        w, plan, eta.window_lo, eta.window_hi, [&](Index r, Index j) -> S {
            return eta_on_orbit[static_cast<std::size_t>(r - r_lo)].at(j);
        });
    return out;
}

// ---------------------------------------------------------------------------
// ConjugacyResult and the two conjugacy directions.
// ---------------------------------------------------------------------------

template <class S>
struct ConjugacyResult {
    SeqVector<S> point;
    SeqVector<S> image;
    real_of<S> series_tail_bound{};
    Index fixed_point_iterations = 0;
    real_of<S> residual{};
    std::vector<double> iterate_diffs;  // successive fixed-point differences
};

namespace detail {

template <class S>
void require_admissible(const PerturbationMap<S>& alpha, const real_of<S>& budget) {
    if (alpha.sup_bound > budget || alpha.lip_bound > budget)
        throw numeric_failure("perturbation exceeds the admissible budget");
}

template <class S>
PerturbationMap<S> translate_map(const PerturbationMap<S>& alpha, Index j) {
    auto inner = alpha;
    auto fn = [inner, j](const SeqVector<S>& y) {
        return inner.eval(y.translated(j)).translated(-j);
    };
    return PerturbationMap<S>::custom(fn, alpha.window_lo - j, alpha.window_hi - j,
                                      alpha.sup_bound, alpha.lip_bound, alpha.space);
}

}  // namespace detail

/// h = I + u with h o B_w = (B_w + alpha) o h, u normalized to have
/// coordinate `normalization_index` identically zero. u is evaluated at the
/// query point by iterating the contraction u -> F^{-1}(alpha o (I + u))
/// along the finitely many orbit points the series requires.
template <class S>
ConjugacyResult<S> conjugate_forward(const WeightSequence<S>& w, const SpaceSpec& space,
                                     const PerturbationMap<S>& alpha, const SeqVector<S>& x,
                                     double tol, Index normalization_index = 0,
                                     const Tolerance& cmp_tol = {}) {
    using R = real_of<S>;
    if (tol <= 0) throw std::invalid_argument("conjugate_forward: tol must be > 0");
    if (normalization_index != 0) {
        const Index j = normalization_index;
        auto res = conjugate_forward(w.shifted(j), space, detail::translate_map(alpha, j),
                                     x.translated(-j), tol, 0, cmp_tol);
        ConjugacyResult<S> out = std::move(res);
        out.point = x;
        out.image = out.image.translated(j);
        return out;
    }
    auto dich = dichotomy_constants(w, cmp_tol);
    const R budget = (R(1) - dich.s) / (R(2) * dich.beta) / R(2);
    detail::require_admissible(alpha, budget);

    auto plan = detail::plan_series(w, dich, alpha.sup_bound, alpha.window_lo, alpha.window_hi,
                                    tol * 0.5);
    ConjugacyResult<S> out;
    out.point = x;
    out.series_tail_bound = plan.tail;
    if (plan.i_pos == 0 && plan.i_neg == 0) {
        // alpha == 0: h is the identity
        out.image = x;
        out.fixed_point_iterations = 1;
        out.residual = R(0);
        return out;
    }

    // contraction rate q <= lip * 2 beta / (1-s) <= 1/2 under the budget
    const double q =
        std::max(1e-6, approx(R(alpha.lip_bound * R(2) * dich.beta / (R(1) - dich.s))));
    const double u1 = std::max(tol, approx(R(R(2) * dich.beta / (R(1) - dich.s) * alpha.sup_bound)));
    Index iters_cap = 2;
    if (alpha.lip_bound > R(0)) {
        iters_cap = static_cast<Index>(std::ceil(std::log(0.25 * tol / u1) / std::log(q))) + 4;
        iters_cap = std::min<Index>(std::max<Index>(iters_cap, 4), 60);
    }

    const Index r_step = std::max(plan.i_pos, plan.i_neg);
    const Index orbit_lo = -(iters_cap * r_step) - plan.i_neg - 1;
    const Index orbit_hi = iters_cap * r_step + plan.i_pos + 2;
    std::vector<SeqVector<S>> orbit(static_cast<std::size_t>(orbit_hi - orbit_lo + 1));
    auto orb = [&](Index r) -> SeqVector<S>& {
        return orbit[static_cast<std::size_t>(r - orbit_lo)];
    };
    orb(0) = x;
    for (Index r = 1; r <= orbit_hi; ++r) orb(r) = apply_backward_shift(w, orb(r - 1));
    for (Index r = -1; r >= orbit_lo; --r) orb(r) = apply_backward_shift_inverse(w, orb(r + 1));

    std::vector<SeqVector<S>> u_prev(orbit.size()), u_next(orbit.size()), eta_abs(orbit.size());
    auto idx = [&](Index r) { return static_cast<std::size_t>(r - orbit_lo); };

    bool converged = false;
    for (Index k = 1; k <= iters_cap; ++k) {
        const Index w_lo = -( (iters_cap - k) * r_step );
        const Index w_hi = 1 + (iters_cap - k) * r_step;
        for (Index r = w_lo - plan.i_neg; r <= w_hi + plan.i_pos - 1; ++r) {
            SeqVector<S> pt = orb(r);
            pt += u_prev[idx(r)];
            eta_abs[idx(r)] = alpha.eval(pt);
        }
        R diff(0);
        for (Index r = w_lo; r <= w_hi; ++r) {
            u_next[idx(r)] = detail::series_from_coords(
                w, plan, alpha.window_lo, alpha.window_hi,
                [&](Index off, Index j) -> S { return eta_abs[idx(r + off)].at(j); });
            SeqVector<S> d = u_next[idx(r)] - u_prev[idx(r)];
            diff = std::max(diff, norm(space, d));
        }
        for (Index r = w_lo; r <= w_hi; ++r) u_prev[idx(r)] = u_next[idx(r)];
        out.iterate_diffs.push_back(approx(diff));
        out.fixed_point_iterations = k;
        if (approx(diff) < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw numeric_failure("conjugate_forward: fixed point did not converge");

    const SeqVector<S>& u0 = u_prev[idx(0)];
    const SeqVector<S>& u1v = u_prev[idx(1)];
    out.image = x + u0;
    // residual of h o B = S o h at x: u(Bx) - B u(x) - alpha(x + u(x))
    SeqVector<S> res = u1v - apply_backward_shift(w, u0);
    res -= alpha.eval(out.image);
    out.residual = norm(space, res);
    return out;
}

/// h' = I + v with h' o S = B_w o h', S = B_w + alpha; v is given by an
/// explicit series over S-orbits (no fixed point needed). S^{-1} is
/// evaluated by the local contraction y <- B^{-1}(target - alpha(y)).
template <class S>
ConjugacyResult<S> conjugate_inverse(const WeightSequence<S>& w, const SpaceSpec& space,
                                     const PerturbationMap<S>& alpha, const SeqVector<S>& x,
                                     double tol, Index normalization_index = 0,
                                     const Tolerance& cmp_tol = {}) {
    using R = real_of<S>;
    if (tol <= 0) throw std::invalid_argument("conjugate_inverse: tol must be > 0");
    if (normalization_index != 0) {
        const Index j = normalization_index;
        auto res = conjugate_inverse(w.shifted(j), space, detail::translate_map(alpha, j),
                                     x.translated(-j), tol, 0, cmp_tol);
        ConjugacyResult<S> out = std::move(res);
        out.point = x;
        out.image = out.image.translated(j);
        return out;
    }
    auto dich = dichotomy_constants(w, cmp_tol);
    const R budget = (R(1) - dich.s) / (R(2) * dich.beta) / R(2);
    detail::require_admissible(alpha, budget);

    auto plan = detail::plan_series(w, dich, alpha.sup_bound, alpha.window_lo, alpha.window_hi,
                                    tol * 0.5);
    ConjugacyResult<S> out;
    out.point = x;
    out.series_tail_bound = plan.tail;
    if (plan.i_pos == 0 && plan.i_neg == 0) {
        out.image = x;
        out.fixed_point_iterations = 1;
        out.residual = R(0);
        return out;
    }

    // S-inversion is a contraction only when Lip(alpha) < min |w|
    const R mw = w.min_abs();
    Index inner_iters_max = 0;
    auto apply_S = [&](const SeqVector<S>& y) {
        SeqVector<S> r = apply_backward_shift(w, y);
        r += alpha.eval(y);
        return r;
    };
    auto solve_S_inverse = [&](const SeqVector<S>& target) {
        SeqVector<S> y = apply_backward_shift_inverse(w, target);
        R prev_diff(-1);
        for (Index it = 0; it < 400; ++it) {
            SeqVector<S> rhs = target - alpha.eval(y);
            SeqVector<S> y2 = apply_backward_shift_inverse(w, rhs);
            SeqVector<S> d = y2 - y;
            R diff = norm(space, d);
            y = std::move(y2);
            inner_iters_max = std::max(inner_iters_max, it + 1);
            if (approx(diff) < tol * 0.05) return y;
            if (prev_diff >= R(0) && diff > prev_diff && !(alpha.lip_bound < mw))
                throw numeric_failure("conjugate_inverse: S-inversion diverged");
            prev_diff = diff;
        }
        throw numeric_failure("conjugate_inverse: S-inversion did not converge");
    };

    // S-orbit points for r in [-i_neg, i_pos], so the series can also be
    // evaluated at S x for the residual.
    const Index r_lo = -plan.i_neg, r_hi = plan.i_pos;
    std::vector<SeqVector<S>> sorbit(static_cast<std::size_t>(r_hi - r_lo + 1));
    auto sidx = [&](Index r) { return static_cast<std::size_t>(r - r_lo); };
    sorbit[sidx(0)] = x;
    for (Index r = 1; r <= r_hi; ++r) sorbit[sidx(r)] = apply_S(sorbit[sidx(r - 1)]);
    for (Index r = -1; r >= r_lo; --r) sorbit[sidx(r)] = solve_S_inverse(sorbit[sidx(r + 1)]);

    std::vector<SeqVector<S>> alpha_abs(sorbit.size());
    for (Index r = r_lo; r <= r_hi; ++r) alpha_abs[sidx(r)] = alpha.eval(sorbit[sidx(r)]);

    // v is the sign-flipped series over S-orbits
    auto eta_at_base = [&](Index base) {
        SeqVector<S> v = detail::series_from_coords(
            w, plan, alpha.window_lo, alpha.window_hi, [&](Index off, Index j) -> S {
                Index r = base + off;
                if (r < r_lo || r > r_hi) return S(0);
                return alpha_abs[sidx(r)].at(j);
            });
        v.scale(S(-1));
        return v;
    };
    SeqVector<S> v0 = eta_at_base(0);
    out.image = x + v0;
    out.fixed_point_iterations = std::max<Index>(1, inner_iters_max);

    // residual of h' o S = B o h' at x: (Sx + v(Sx)) - B(x + v(x))
    SeqVector<S> v1 = eta_at_base(1);
    SeqVector<S> lhs = sorbit[sidx(1)] + v1;
    SeqVector<S> rhs = apply_backward_shift(w, out.image);
    SeqVector<S> res = lhs - rhs;
    out.residual = norm(space, res);
    return out;
}

/// || h(B_w x) - (B_w + alpha)(h(x)) || with h from conjugate_forward.
template <class S>
real_of<S> conjugacy_residual(const WeightSequence<S>& w, const SpaceSpec& space,
                              const PerturbationMap<S>& alpha, const SeqVector<S>& x, double tol,
                              const Tolerance& cmp_tol = {}) {
    return conjugate_forward(w, space, alpha, x, tol, 0, cmp_tol).residual;
}

}  // namespace shiftdyn
