#pragma once

// Shared fixtures and random eventually-periodic weight generators for the
// property suites.

#include "shiftdyn/io.hpp"

#include <random>
#include <vector>

namespace tg {

using namespace shiftdyn;
using Rat = Rational;

inline Rat Q(long long n, long long d = 1) { return Rat(n, d); }

/// w_n = 1/2 for n < 0, 2 for n >= 0.
inline WeightSequence<Rat> a2() { return WeightSequence<Rat>({Q(1, 2)}, 0, {}, {Q(2)}); }
inline WeightSequence<double> a2d() { return WeightSequence<double>({0.5}, 0, {}, {2.0}); }

inline WeightSequence<Rat> constant(long long n, long long d = 1) {
    return WeightSequence<Rat>::constant(Q(n, d));
}

// ---------------------------------------------------------------------------
// random rational weights
// ---------------------------------------------------------------------------

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    Index pick_index(Index lo, Index hi) {
        return std::uniform_int_distribution<Index>(lo, hi)(g);
    }
    bool coin() { return std::uniform_int_distribution<int>(0, 1)(g) == 1; }
};

// |w| in [1/3, 3], random sign, small numerator/denominator
inline Rat random_weight(Rng& rng) {
    static const std::vector<Rat> pool = {
        Q(1, 3), Q(2, 5), Q(1, 2), Q(3, 5), Q(2, 3), Q(3, 4), Q(4, 5), Q(9, 10),
        Q(1),    Q(11, 10), Q(5, 4), Q(4, 3), Q(3, 2), Q(5, 3), Q(2),  Q(5, 2), Q(3)};
    Rat v = pool[static_cast<std::size_t>(rng.pick_index(0, static_cast<Index>(pool.size()) - 1))];
    return rng.coin() ? v : Rat(-v);
}

inline std::vector<Rat> random_list(Rng& rng, Index len) {
    std::vector<Rat> v;
    for (Index i = 0; i < len; ++i) v.push_back(random_weight(rng));
    return v;
}

inline Rat abs_prod(const std::vector<Rat>& v) {
    Rat p(1);
    for (const auto& x : v) p *= abs_of(x);
    return p;
}

/// Unconstrained eventually periodic bilateral spec.
inline WeightSequence<Rat> random_spec(Rng& rng) {
    auto tail = [&](Index maxlen) {
        while (true) {
            auto t = random_list(rng, rng.pick_index(1, maxlen));
            if (!(abs_prod(t) == Rat(1))) return t;  // keep decisions strict
        }
    };
    return WeightSequence<Rat>(tail(3), rng.pick_index(-3, 3), random_list(rng, rng.pick_index(0, 3)),
                               tail(3));
}

// ---------------------------------------------------------------------------
// Tame split-class generator. The constraints below provably bound the
// two-sided orbit of the basis vector anchored just left of the core by 4
// over any horizon:
//   left tail: |period product| <= 3/4 and every right-to-left prefix
//     magnitude in [1/4, 2];
//   right tail: |period product| >= 4/3 and every prefix reciprocal in
//     [1/4, 2];
//   core: every prefix magnitude in [1/2, 2].
// ---------------------------------------------------------------------------

inline std::vector<Rat> gen_left_tame(Rng& rng) {
    while (true) {
        auto t = random_list(rng, rng.pick_index(1, 3));
        if (!(abs_prod(t) <= Q(3, 4))) continue;
        Rat p(1);
        bool ok = true;
        for (auto it = t.rbegin(); it != t.rend(); ++it) {
            p *= abs_of(*it);
            if (p < Q(1, 4) || p > Q(2)) ok = false;
        }
        if (ok) return t;
    }
}

inline std::vector<Rat> gen_right_tame(Rng& rng) {
    while (true) {
        auto t = random_list(rng, rng.pick_index(1, 3));
        if (!(abs_prod(t) >= Q(4, 3))) continue;
        Rat p(1);
        bool ok = true;
        for (const auto& x : t) {
            p *= abs_of(x);
            Rat rec = Rat(1) / p;
            if (rec < Q(1, 4) || rec > Q(2)) ok = false;
        }
        if (ok) return t;
    }
}

inline std::vector<Rat> gen_core_tame(Rng& rng) {
    while (true) {
        auto c = random_list(rng, rng.pick_index(0, 2));
        Rat p(1);
        bool ok = true;
        for (const auto& x : c) {
            p *= abs_of(x);
            if (p < Q(1, 2) || p > Q(2)) ok = false;
        }
        if (ok) return c;
    }
}

inline WeightSequence<Rat> random_tame_split(Rng& rng) {
    return WeightSequence<Rat>(gen_left_tame(rng), rng.pick_index(-2, 2), gen_core_tame(rng),
                               gen_right_tame(rng));
}

/// Stratified generator: roughly equal counts of decaying / expanding /
/// split / mixed specs, the split ones from the tame pool.
inline WeightSequence<Rat> random_classified_spec(Rng& rng, int stratum) {
    switch (stratum % 4) {
        case 0: {  // both tails decaying
            auto mk = [&]() { return gen_left_tame(rng); };
            return WeightSequence<Rat>(mk(), rng.pick_index(-2, 2), gen_core_tame(rng), mk());
        }
        case 1: {  // both tails expanding
            auto mk = [&]() { return gen_right_tame(rng); };
            return WeightSequence<Rat>(mk(), rng.pick_index(-2, 2), gen_core_tame(rng), mk());
        }
        case 2:
            return random_tame_split(rng);
        default:
            return random_spec(rng);
    }
}

/// Random unilateral spec with the tail rate bounded away from 1.
inline UnilateralWeights<Rat> random_unilateral(Rng& rng) {
    while (true) {
        auto tail = random_list(rng, rng.pick_index(1, 3));
        Rat p = abs_prod(tail);
        if (p > Q(9, 10) && p < Q(10, 9)) continue;
        return UnilateralWeights<Rat>(random_list(rng, rng.pick_index(0, 3)), std::move(tail));
    }
}

}  // namespace tg
