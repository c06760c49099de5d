#pragma once

#include "shiftdyn/classify.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <vector>

namespace shiftdyn {

enum class ShiftOp { bilateral_backward, unilateral_forward };

template <class S, class R>
S scalar_from_real(const R& r) {
    if constexpr (std::is_same_v<S, std::complex<double>>) {
        return {r, 0.0};
    } else {
        return S(r);
    }
}

// ---------------------------------------------------------------------------
// PseudoTrajectory: finite window of points with a declared defect bound.
// ---------------------------------------------------------------------------

template <class S>
struct PseudoTrajectory {
    Index n0 = 0;
    std::vector<SeqVector<S>> points;
    real_of<S> delta{};
    ShiftOp op = ShiftOp::bilateral_backward;

    Index n1() const { return n0 + static_cast<Index>(points.size()) - 1; }
    const SeqVector<S>& at_time(Index n) const {
        if (n < n0 || n > n1()) throw std::out_of_range("trajectory time out of window");
        return points[static_cast<std::size_t>(n - n0)];
    }
};

template <class S>
SeqVector<S> apply_op(const WeightSequence<S>& w, ShiftOp op, const SeqVector<S>& x) {
    return op == ShiftOp::bilateral_backward ? apply_backward_shift(w, x)
                                             : apply_forward_shift(w, x);
}

/// Orbit value at time n of the point `v` sitting at time 0.
template <class S>
SeqVector<S> orbit_at(const WeightSequence<S>& w, ShiftOp op, const SeqVector<S>& v, Index n) {
    if (op == ShiftOp::bilateral_backward) return iterate(w, v, n);
    if (n < 0) throw std::domain_error("forward shift orbits are defined for n >= 0 only");
    SeqVector<S> cur = v;
    for (Index i = 0; i < n; ++i) cur = apply_forward_shift(w, cur);
    return cur;
}

template <class S>
real_of<S> defect(const WeightSequence<S>& w, const SpaceSpec& space,
                  const PseudoTrajectory<S>& traj) {
    using R = real_of<S>;
    if (traj.points.size() < 2) throw std::invalid_argument("defect: trajectory too short");
    R worst(0);
    for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
        SeqVector<S> step = apply_op(w, traj.op, traj.points[i]);
        step -= traj.points[i + 1];
        worst = std::max(worst, norm(space, step));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Random pseudotrajectories. Coordinates are dyadic rationals, so the same
// draw is reproducible across scalar backends and exact in rational mode;
// kick shapes are drawn inside the unit ball and scaled by delta, making the
// whole trajectory exactly linear in delta for a fixed seed.
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
S random_dyadic(std::mt19937_64& rng) {
    constexpr long long den = 1 << 20;
    std::uniform_int_distribution<long long> d(-den, den);
    if constexpr (std::is_same_v<S, std::complex<double>>) {
        return {static_cast<double>(d(rng)) / den, static_cast<double>(d(rng)) / den};
    } else {
        return from_fraction<S>(d(rng), den);
    }
}

// Scale into the radius-ball of the space. Where the exact norm is not
// available (rational lp, p != 1) the l1 norm is used as a certified upper
// bound, which keeps the vector inside the ball for every p >= 1.
template <class S>
void scale_into_ball(const SpaceSpec& space, SeqVector<S>& x, const real_of<S>& radius) {
    using R = real_of<S>;
    if (x.is_zero()) return;
    R n(0);
    if constexpr (scalar_traits<S>::is_exact) {
        if (space.is_sup()) {
            n = norm(space, x);
        } else {
            for (const auto& v : x.coeffs()) n += abs_of(v);  // l1 dominates lp
        }
    } else {
        n = norm(space, x);
    }
    if (n > radius) x.scale(scalar_from_real<S>(R(radius / n)));
}

}  // namespace detail

template <class S>
PseudoTrajectory<S> random_pseudotrajectory(const WeightSequence<S>& w, const SpaceSpec& space,
                                            const real_of<S>& delta, Index n0, Index n1,
                                            std::uint64_t seed, Index support_radius) {
    using R = real_of<S>;
    if (!(n0 < n1)) throw std::invalid_argument("random_pseudotrajectory: window must be n0 < n1");
    if (support_radius < 0) throw std::invalid_argument("support_radius must be >= 0");
    if (delta < R(0)) throw std::invalid_argument("delta must be >= 0");
    std::mt19937_64 rng(seed);
    auto draw_ball = [&](const R& radius) {
        std::vector<S> c;
        for (Index i = -support_radius; i <= support_radius; ++i)
            c.push_back(detail::random_dyadic<S>(rng));
        SeqVector<S> v(-support_radius, std::move(c));
        detail::scale_into_ball(space, v, R(1));
        if (!(radius == R(1))) v.scale(scalar_from_real<S>(radius));
        return v;
    };
    PseudoTrajectory<S> traj;
    traj.n0 = n0;
    traj.delta = delta;
    traj.points.push_back(draw_ball(R(1)));
    for (Index n = n0; n < n1; ++n) {
        SeqVector<S> next = apply_backward_shift(w, traj.points.back());
        if (delta > R(0)) next += draw_ball(delta);
        traj.points.push_back(std::move(next));
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Adversarial constructions.
//
// backward_necessity: starts at a phase-aligned basis vector e_{t+m} and
//   kicks the moving coordinate with aligned phases; after m+1 steps the
//   coordinate t-1 accumulates |w_t ... w_{t+m}| + delta * sum of the
//   shorter product magnitudes.
// bilateral_e0: y_0 = e_0, kicked by delta * e_0 forward and backward.
// forward_unilateral: starts at 0 under the forward shift; kicks at e_k for
//   k = 1..t aligned so coordinate t+1 of x_{t+1} is delta * sum of
//   |w_k ... w_t|.
// ---------------------------------------------------------------------------

enum class AdversarialKind { backward_necessity, bilateral_e0, forward_unilateral };

template <class S>
PseudoTrajectory<S> adversarial_pseudotrajectory(const WeightSequence<S>& w,
                                                 const SpaceSpec& space, AdversarialKind kind,
                                                 const real_of<S>& delta, Index t, Index m) {
    (void)space;
    using R = real_of<S>;
    if (delta <= R(0)) throw std::invalid_argument("adversarial trajectory: delta must be > 0");
    PseudoTrajectory<S> traj;
    traj.delta = delta;
    const S sdelta = scalar_from_real<S>(delta);
    switch (kind) {
        case AdversarialKind::backward_necessity: {
            if (t < 1 || m < 1) throw std::invalid_argument("backward_necessity needs t, m >= 1");
            traj.n0 = 0;
            SeqVector<S> cur = SeqVector<S>::unit(t + m, unit_phase(w.product(t, t + m)));
            traj.points.push_back(cur);
            for (Index k = 1; k <= m; ++k) {
                cur = apply_backward_shift(w, cur);
                S phase = unit_phase(w.product(t, t + m - k));
                cur.axpy(sdelta * phase, SeqVector<S>::unit(t + m - k));
                traj.points.push_back(cur);
            }
            traj.points.push_back(apply_backward_shift(w, cur));
            return traj;
        }
        case AdversarialKind::bilateral_e0: {
            if (m < 1) throw std::invalid_argument("bilateral_e0 needs m >= 1");
            traj.n0 = -m;
            traj.points.assign(static_cast<std::size_t>(2 * m + 1), SeqVector<S>());
            auto put = [&](Index n, SeqVector<S> v) {
                traj.points[static_cast<std::size_t>(n + m)] = std::move(v);
            };
            SeqVector<S> e0 = SeqVector<S>::unit(0);
            put(0, e0);
            SeqVector<S> cur = e0;
            for (Index n = 1; n <= m; ++n) {
                cur = apply_backward_shift(w, cur);
                cur.axpy(sdelta, e0);
                put(n, cur);
            }
            cur = e0;
            for (Index n = -1; n >= -m; --n) {
                SeqVector<S> up = cur;
                up.axpy(sdelta, e0);
                cur = apply_backward_shift_inverse(w, up);
                put(n, cur);
            }
            return traj;
        }
        case AdversarialKind::forward_unilateral: {
            if (t < 1) throw std::invalid_argument("forward_unilateral needs t >= 1");
            traj.n0 = 0;
            traj.op = ShiftOp::unilateral_forward;
            SeqVector<S> cur;  // x_0 = 0
            traj.points.push_back(cur);
            for (Index k = 1; k <= t; ++k) {
                cur = cur.is_zero() ? cur : apply_forward_shift(w, cur);
                S phase = unit_phase(w.product(k, t));
                cur.axpy(sdelta * phase, SeqVector<S>::unit(k));
                traj.points.push_back(cur);
            }
            traj.points.push_back(apply_forward_shift(w, cur));
            return traj;
        }
    }
    throw std::invalid_argument("adversarial_pseudotrajectory: bad kind");
}

// ---------------------------------------------------------------------------
// Shadowing via the splitting series. The two one-sided series satisfy
// first-order recurrences, so the whole window is computed in linear time
// and the identity  B y_n + z_n = y_{n+1}  holds by construction (exactly in
// rational mode). The shadow orbit is x_n - y_n, a genuine orbit.
// ---------------------------------------------------------------------------

template <class S>
struct ShadowResult {
    SeqVector<S> shadow_point;  // orbit value at time 0
    real_of<S> max_error{};
    real_of<S> error_bound{};  // a-priori: 2 c delta / (1 - t)
    std::vector<real_of<S>> per_step_errors;
    std::vector<real_of<S>> recurrence_residuals;
    ContractionConstants<real_of<S>> constants{};
};

namespace detail {

template <class S>
ShadowResult<S> shadow_with_splitting(const WeightSequence<S>& w, const SpaceSpec& space,
                                      const PseudoTrajectory<S>& traj, RateRegime regime,
                                      const Tolerance& tol) {
    using R = real_of<S>;
    if (traj.op != ShiftOp::bilateral_backward)
        throw std::domain_error("shadowing series: bilateral backward trajectories only");
    if (traj.points.size() < 2) throw std::invalid_argument("trajectory too short");

    const std::size_t n_pts = traj.points.size();
    std::vector<SeqVector<S>> zm(n_pts - 1), zn(n_pts - 1);
    for (std::size_t i = 0; i + 1 < n_pts; ++i) {
        SeqVector<S> z = traj.points[i + 1] - apply_backward_shift(w, traj.points[i]);
        switch (regime) {
            case RateRegime::decaying: zm[i] = std::move(z); break;
            case RateRegime::expanding: zn[i] = std::move(z); break;
            case RateRegime::split: {
                auto mn = split_MN(z);
                zm[i] = std::move(mn.first);
                zn[i] = std::move(mn.second);
                break;
            }
        }
    }

    std::vector<SeqVector<S>> ym(n_pts), yn(n_pts);
    for (std::size_t i = 0; i + 1 < n_pts; ++i) {
        ym[i + 1] = apply_backward_shift(w, ym[i]);
        ym[i + 1] += zm[i];
    }
    for (std::size_t i = n_pts - 1; i-- > 0;) {
        SeqVector<S> u = yn[i + 1] - zn[i];
        yn[i] = apply_backward_shift_inverse(w, u);
    }

    ShadowResult<S> out;
    out.constants = contraction_constants(w, regime, tol);
    out.error_bound = R(2) * out.constants.c * traj.delta / (R(1) - out.constants.t);
    out.per_step_errors.reserve(n_pts);
    std::vector<SeqVector<S>> y(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
        y[i] = ym[i] + yn[i];
        R e = norm(space, y[i]);
        out.per_step_errors.push_back(e);
        out.max_error = std::max(out.max_error, e);
    }
    for (std::size_t i = 0; i + 1 < n_pts; ++i) {
        SeqVector<S> r = apply_backward_shift(w, y[i]);
        r += traj.points[i + 1] - apply_backward_shift(w, traj.points[i]);
        r -= y[i + 1];
        out.recurrence_residuals.push_back(norm(space, r));
    }
    SeqVector<S> at_n0 = traj.points[0] - y[0];
    out.shadow_point = iterate(w, at_n0, -traj.n0);
    return out;
}

}  // namespace detail

/// Positive shadowing (window indexed n >= 0).
template <class S>
ShadowResult<S> shadow_positive(const WeightSequence<S>& w, const SpaceSpec& space,
                                const PseudoTrajectory<S>& traj, const Tolerance& tol = {}) {
    if (traj.n0 < 0)
        throw std::domain_error("shadow_positive: trajectory must be based at n >= 0");
    auto rep = classify_shadowing(w, tol);
    return detail::shadow_with_splitting(w, space, traj, regime_of<S>(rep.shadowing_class), tol);
}

/// Two-sided shadowing; the window must contain time 0.
template <class S>
ShadowResult<S> shadow_bilateral(const WeightSequence<S>& w, const SpaceSpec& space,
                                 const PseudoTrajectory<S>& traj, const Tolerance& tol = {}) {
    if (traj.n0 > 0 || traj.n1() < 0)
        throw std::domain_error("shadow_bilateral: window must contain time 0");
    auto rep = classify_shadowing(w, tol);
    return detail::shadow_with_splitting(w, space, traj, regime_of<S>(rep.shadowing_class), tol);
}

// ---------------------------------------------------------------------------
// Ground-truth oracle. Shift orbits act independently along index lines:
// coordinate j of the time-n orbit point depends only on the candidate
// coordinate d (d = j + n backward, d = j - n forward), scaled by an exact
// weight product. In the sup norm the minimax problem therefore decouples
// into one-dimensional Chebyshev problems solved exactly by the two-point
// envelope formula. For lp the decoupled minimizer gives an upper bound and
// two certified lower bounds are reported: the sup-norm relaxation and the
// uniform-time-weight aggregate of the per-diagonal 1-d minima (p = 1 via
// weighted median, p = 2 via least squares).
// ---------------------------------------------------------------------------

template <class S>
struct OracleResult {
    SeqVector<S> best_point;
    real_of<S> best_error{};   // achieved by best_point (exact optimum in sup norm)
    real_of<S> lower_bound{};  // certified lower bound on any candidate's error
    bool optimal = false;      // true when best_error is the exact optimum
};

namespace detail {

template <class S>
struct DiagonalConstraint {
    S target;
    S factor;  // orbit coefficient multiplying the candidate coordinate
};

// exact (real) / lower-bound (complex) Chebyshev minimum and its center
template <class S>
void chebyshev_center(const std::vector<DiagonalConstraint<S>>& cons, real_of<S>& err, S& center) {
    using R = real_of<S>;
    err = R(0);
    center = S(0);
    bool have_center = false;
    const std::size_t n = cons.size();
    for (std::size_t i = 0; i < n; ++i) {
        const R wi = abs_of(cons[i].factor);
        const S ai = cons[i].target / cons[i].factor;
        for (std::size_t j = i + 1; j < n; ++j) {
            const R wj = abs_of(cons[j].factor);
            const S aj = cons[j].target / cons[j].factor;
            const R gap = abs_of(S(ai - aj));
            if (gap == R(0)) continue;
            const R e = gap / (R(1) / wi + R(1) / wj);
            if (e > err) {
                err = e;
                if constexpr (scalar_traits<S>::is_complex) {
                    center = (ai * wi + aj * wj) / scalar_from_real<S>(R(wi + wj));
                } else {
                    center = (ai * wi + aj * wj) / S(wi + wj);
                }
                have_center = true;
            }
        }
    }
    if (!have_center) {
        // all normalized targets coincide; match them exactly
        center = cons[0].target / cons[0].factor;
    }
}

// per-diagonal minimum of sum_n |a_n - p_n c|^p, for the aggregate bound
template <class S>
real_of<S> power_sum_minimum(const std::vector<DiagonalConstraint<S>>& cons, double p,
                             bool allow_center) {
    using R = real_of<S>;
    if constexpr (scalar_traits<S>::is_complex) {
        (void)cons;
        (void)p;
        (void)allow_center;
        return R(0);
    } else {
        if (!allow_center) {
            R s(0);
            for (const auto& c : cons) {
                R a = abs_of(c.target);
                if (p == 1.0)
                    s += a;
                else if (p == 2.0)
                    s += a * a;
            }
            return s;
        }
        if (p == 1.0) {
            // weighted median of a/p with weights |p|
            std::vector<std::pair<S, R>> pts;
            R total(0);
            for (const auto& c : cons) {
                pts.emplace_back(c.target / c.factor, abs_of(c.factor));
                total += pts.back().second;
            }
            std::sort(pts.begin(), pts.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            R acc(0);
            S med = pts.back().first;
            for (const auto& pr : pts) {
                acc += pr.second;
                if (R(2) * acc >= total) {
                    med = pr.first;
                    break;
                }
            }
            R s(0);
            for (const auto& c : cons) s += abs_of(S(c.target - c.factor * med));
            return s;
        }
        if (p == 2.0) {
            R num(0), den(0);
            for (const auto& c : cons) {
                num += c.factor * c.target;
                den += c.factor * c.factor;
            }
            S cstar = S(num / den);
            R s(0);
            for (const auto& c : cons) {
                R r = abs_of(S(c.target - c.factor * cstar));
                s += r * r;
            }
            return s;
        }
        return R(0);
    }
}

}  // namespace detail

template <class S>
OracleResult<S> oracle_best_shadow(const WeightSequence<S>& w, const SpaceSpec& space,
                                   const PseudoTrajectory<S>& traj, Index support_lo,
                                   Index support_hi) {
    using R = real_of<S>;
    if (support_lo > support_hi) throw std::invalid_argument("oracle: empty support window");
    const bool forward = traj.op == ShiftOp::unilateral_forward;
    if (forward && support_lo < 1) support_lo = 1;

    // Collect constraints per candidate coordinate (diagonal).
    std::map<Index, std::vector<detail::DiagonalConstraint<S>>> diag;
    R forced(0);

    // Active diagonals: those carrying a nonzero target anywhere.
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const Index n = traj.n0 + static_cast<Index>(i);
        const auto& x = traj.points[i];
        if (x.is_zero()) continue;
        for (Index j = x.lo(); j <= x.hi(); ++j) {
            if (x.at(j) == S(0)) continue;
            const Index d = forward ? j - n : j + n;
            const bool in_window = d >= support_lo && d <= support_hi && (!forward || d >= 1);
            if (!in_window) {
                R a = abs_of(x.at(j));
                forced = std::max(forced, a);
            } else {
                diag.emplace(d, std::vector<detail::DiagonalConstraint<S>>{});
            }
        }
    }
    // Fill each active diagonal with the full column of constraints
    // (zero targets included: they pin the candidate coordinate too).
    for (auto& [d, cons] : diag) {
        cons.reserve(traj.points.size());
        S p(1);
        // factor at the first time in the window, then extend stepwise
        const Index nfirst = traj.n0;
        if (forward) {
            p = w.product_or_one(d, d + nfirst - 1);
        } else {
            if (nfirst >= 1)
                p = w.product(d - nfirst + 1, d);
            else if (nfirst <= -1)
                p = S(1) / w.product(d + 1, d - nfirst);
        }
        for (std::size_t i = 0; i < traj.points.size(); ++i) {
            const Index n = traj.n0 + static_cast<Index>(i);
            const Index j = forward ? d + n : d - n;
            cons.push_back({traj.points[i].at(j), p});
            // advance factor to time n+1
            if (forward)
                p *= w.at(d + n);
            else
                p *= w.at(j);  // product over (j', d] gains w_j as n grows
        }
    }

    OracleResult<S> out;
    R sup_opt = forced;
    for (auto& [d, cons] : diag) {
        R e;
        S center;
        detail::chebyshev_center(cons, e, center);
        sup_opt = std::max(sup_opt, e);
        if (!(center == S(0))) out.best_point.set(d, center);
    }

    if (space.is_sup() && !scalar_traits<S>::is_complex) {
        // real scalars: the two-point envelope solves each diagonal exactly
        out.best_error = sup_opt;
        out.lower_bound = sup_opt;
        out.optimal = true;
        return out;
    }

    // lp, or complex sup norm (where the pairwise value is only a lower
    // bound): report the achieved error of the decoupled point.
    R achieved(0);
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const Index n = traj.n0 + static_cast<Index>(i);
        SeqVector<S> err = traj.points[i] - orbit_at(w, traj.op, out.best_point, n);
        achieved = std::max(achieved, norm(space, err));
    }
    out.best_error = achieved;
    out.optimal = false;

    R lower = sup_opt;  // sup-norm relaxation
    if (!scalar_traits<S>::is_complex && (space.p == 1.0 || space.p == 2.0)) {
        R total(0);
        for (auto& [d, cons] : diag) total += detail::power_sum_minimum(cons, space.p, true);
        // out-of-window nonzero targets cost their own magnitude
        for (std::size_t i = 0; i < traj.points.size(); ++i) {
            const Index n = traj.n0 + static_cast<Index>(i);
            const auto& x = traj.points[i];
            if (x.is_zero()) continue;
            for (Index j = x.lo(); j <= x.hi(); ++j) {
                const Index d = forward ? j - n : j + n;
                const bool in_window = d >= support_lo && d <= support_hi && (!forward || d >= 1);
                if (in_window || x.at(j) == S(0)) continue;
                R a = abs_of(x.at(j));
                total += space.p == 1.0 ? a : R(a * a);
            }
        }
        R avg = total / R(static_cast<long long>(traj.points.size()));
        R agg;
        if constexpr (scalar_traits<S>::is_exact) {
            agg = avg;  // compare p-th powers exactly; see below
            // lower bound in value form: for p = 1 avg itself, for p = 2 sqrt
            if (space.p == 2.0) {
                double root = std::sqrt(approx(avg));
                agg = R(rational_from_double(root));
                // keep it a valid lower bound: shrink until agg^2 <= avg
                while (agg * agg > avg) agg = agg * R(1048575) / R(1048576);
            }
        } else {
            agg = space.p == 1.0 ? avg : R(std::sqrt(approx(avg)));
        }
        lower = std::max(lower, agg);
    }
    out.lower_bound = lower;
    return out;
}

template <class S>
OracleResult<S> oracle_best_shadow(const WeightSequence<S>& w, const SpaceSpec& space,
                                   const PseudoTrajectory<S>& traj) {
    Index lo = traj.n0 - 64, hi = traj.n1() + 64;
    for (const auto& x : traj.points)
        if (!x.is_zero()) {
            lo = std::min(lo, x.lo() + traj.n0);
            hi = std::max(hi, x.hi() + traj.n1());
        }
    return oracle_best_shadow(w, space, traj, lo, hi);
}

// ---------------------------------------------------------------------------
// verify_shadow: does the orbit of `candidate` eps-shadow the trajectory?
// ---------------------------------------------------------------------------

template <class S>
struct VerifyReport {
    bool shadows = false;
    real_of<S> max_error{};
    std::vector<real_of<S>> per_step_errors;
};

template <class S>
VerifyReport<S> verify_shadow(const WeightSequence<S>& w, const SpaceSpec& space,
                              const PseudoTrajectory<S>& traj, const SeqVector<S>& candidate,
                              const real_of<S>& eps) {
    using R = real_of<S>;
    VerifyReport<S> rep;
    rep.per_step_errors.resize(traj.points.size());
    if (traj.op == ShiftOp::unilateral_forward && traj.n0 < 0)
        throw std::domain_error("verify_shadow: forward trajectories start at n >= 0");
    SeqVector<S> cur = orbit_at(w, traj.op, candidate, traj.n0);
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        SeqVector<S> err = traj.points[i] - cur;
        R e = norm(space, err);
        rep.per_step_errors[i] = e;
        rep.max_error = std::max(rep.max_error, e);
        if (i + 1 < traj.points.size()) cur = apply_op(w, traj.op, cur);
    }
    rep.shadows = rep.max_error < eps;
    return rep;
}

}  // namespace shiftdyn
