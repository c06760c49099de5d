#include "testgen.hpp"

#include <doctest.h>

using namespace shiftdyn;
using tg::Q;

TEST_CASE("classification of the reference families") {
    CHECK(classify_shadowing(tg::a2()).shadowing_class == ShadowingClass::C);
    CHECK(classify_shadowing(tg::a2()).hyperbolic == TriState::no);
    CHECK(classify_shadowing(tg::constant(1, 2)).shadowing_class == ShadowingClass::A);
    CHECK(classify_shadowing(tg::constant(2)).shadowing_class == ShadowingClass::B);
    CHECK(classify_shadowing(tg::constant(1)).shadowing_class == ShadowingClass::none);

    // 2 on the left, 1 on the right: g_right = 1 exactly
    auto remark = WeightSequence<Rational>({Q(2)}, 0, {}, {Q(1)});
    CHECK(classify_shadowing(remark).shadowing_class == ShadowingClass::none);

    // 2 on the left, 1/2 on the right: expansive without shadowing
    auto anti = WeightSequence<Rational>({Q(2)}, 0, {}, {Q(1, 2)});
    auto rep = classify_shadowing(anti);
    CHECK(rep.shadowing_class == ShadowingClass::none);
    CHECK(rep.uniform_expansivity == UniformExpansivity::c);
}

TEST_CASE("uniform expansivity classes") {
    CHECK(uniform_expansivity_class(tg::constant(1, 2)) == UniformExpansivity::a);
    CHECK(uniform_expansivity_class(tg::constant(2)) == UniformExpansivity::b);
    CHECK(uniform_expansivity_class(tg::a2()) == UniformExpansivity::none);
    CHECK(uniform_expansivity_class(tg::constant(1)) == UniformExpansivity::none);
}

TEST_CASE("float mode returns BOUNDARY near rate one") {
    auto w = WeightSequence<double>({2.0}, 0, {}, {1.0 + 1e-14});
    auto rep = classify_shadowing(w, Tolerance{1e-12});
    CHECK(rep.shadowing_class == ShadowingClass::boundary);
    CHECK(rep.hyperbolic == TriState::boundary);
    CHECK(rep.boundary_quantity == "g_right");
    CHECK(rep.boundary_distance <= 1e-12);
    // far from the boundary the float decision matches the exact one
    auto w2 = WeightSequence<double>({0.5}, 0, {}, {2.0});
    CHECK(classify_shadowing(w2).shadowing_class == ShadowingClass::C);
}

TEST_CASE("classification is invariant under index relabeling") {
    tg::Rng rng(61);
    for (int rep = 0; rep < 40; ++rep) {
        auto w = tg::random_spec(rng);
        auto base = classify_shadowing(w);
        for (Index off : {-7, -1, 3, 12}) {
            auto shifted = classify_shadowing(w.shifted(off));
            CHECK(shifted.shadowing_class == base.shadowing_class);
            CHECK(shifted.hyperbolic == base.hyperbolic);
            CHECK(shifted.uniform_expansivity == base.uniform_expansivity);
        }
    }
}

TEST_CASE("reversal-inversion swaps A and B and fixes C") {
    tg::Rng rng(67);
    auto swap_ab = [](ShadowingClass c) {
        if (c == ShadowingClass::A) return ShadowingClass::B;
        if (c == ShadowingClass::B) return ShadowingClass::A;
        return c;
    };
    for (int rep = 0; rep < 60; ++rep) {
        auto w = tg::random_classified_spec(rng, rep);
        auto wi = w.reversed_inverted();
        // the transform inverts and reverses: w''(n) = 1 / w(-n+1)
        for (Index n = -12; n <= 12; ++n) CHECK(wi.at(n) == Rational(1) / w.at(-n + 1));
        CHECK(classify_shadowing(wi).shadowing_class ==
              swap_ab(classify_shadowing(w).shadowing_class));
    }
}

TEST_CASE("uniform expansivity c is shadowing class C of the reversed sequence") {
    tg::Rng rng(71);
    for (int rep = 0; rep < 60; ++rep) {
        auto w = tg::random_classified_spec(rng, rep);
        auto wr = w.reversed();
        for (Index n = -12; n <= 12; ++n) CHECK(wr.at(n) == w.at(-n));
        const bool is_c = uniform_expansivity_class(w) == UniformExpansivity::c;
        const bool rev_C = classify_shadowing(wr).shadowing_class == ShadowingClass::C;
        CHECK(is_c == rev_C);
    }
}

TEST_CASE("unilateral positive-shadowing classes") {
    auto half = unilateral_part(tg::constant(1, 2));
    auto two = unilateral_part(tg::constant(2));
    CHECK(classify_unilateral(half, UnilateralDirection::forward) == UnilateralClass::hyperbolic_A);
    CHECK(classify_unilateral(two, UnilateralDirection::forward) == UnilateralClass::none);
    CHECK(classify_unilateral(two, UnilateralDirection::backward) == UnilateralClass::expanding_b);
    CHECK(classify_unilateral(half, UnilateralDirection::backward) ==
          UnilateralClass::hyperbolic_A);
    auto ones = unilateral_part(tg::constant(1));
    CHECK(classify_unilateral(ones, UnilateralDirection::backward) == UnilateralClass::none);
}

TEST_CASE("stable and unstable set membership") {
    auto c0 = SpaceSpec::c0();
    auto half = tg::constant(1, 2);
    auto v = stable_set_member(half, c0, SeqVector<Rational>::unit(0), Q(1), Q(1, 2), 10,
                               OrbitSide::stable);
    CHECK(v.member);
    CHECK(v.certified_beyond);

    auto a2 = tg::a2();
    auto vu = stable_set_member(a2, c0, SeqVector<Rational>::unit(1), Q(1), Q(1, 2), 10,
                                OrbitSide::unstable);
    CHECK(vu.member);

    auto ones = tg::constant(1);
    auto vf = stable_set_member(ones, c0, SeqVector<Rational>::unit(0), Q(1), Q(9, 10), 10,
                                OrbitSide::stable);
    CHECK(!vf.member);
    REQUIRE(vf.violation_n.has_value());
    // the witness step really violates the decay bound
    Index n = *vf.violation_n;
    CHECK(Q(1) > pow_int(Q(9, 10), static_cast<unsigned>(n)));
}

TEST_CASE("stable set: decisions are certified past the scan horizon") {
    // decays for 3 steps through the core, then expands: not a member, and
    // the violation appears beyond one period even though the early checks
    // pass
    auto w = WeightSequence<Rational>({Q(2)}, 0, {Q(1, 2), Q(1, 2), Q(1, 2)}, {Q(2)});
    auto c0 = SpaceSpec::c0();
    auto v = stable_set_member(w, c0, SeqVector<Rational>::unit(2), Q(2), Q(4, 5), 4,
                               OrbitSide::stable);
    CHECK(!v.member);
    CHECK(v.violation_n.has_value());
}

TEST_CASE("bounded orbit witnesses") {
    auto c0 = SpaceSpec::c0();
    auto wit = bounded_orbit_witness(tg::a2(), c0, 60, Q(4));
    REQUIRE(wit.has_value());
    CHECK(*wit == SeqVector<Rational>::unit(0));
    // the documented orbit bound of e_0 under the split family
    SeqVector<Rational> f = *wit, b = *wit;
    Rational sup(1);
    for (Index n = 1; n <= 60; ++n) {
        f = apply_backward_shift(tg::a2(), f);
        b = apply_backward_shift_inverse(tg::a2(), b);
        sup = std::max({sup, norm(c0, f), norm(c0, b)});
    }
    CHECK(sup == Q(2));

    CHECK(!bounded_orbit_witness(tg::constant(2), c0, 60, Q(4)).has_value());
    auto wit1 = bounded_orbit_witness(tg::constant(1), c0, 60, Q(1));
    REQUIRE(wit1.has_value());  // isometric orbit
    CHECK(*wit1 == SeqVector<Rational>::unit(0));
}

TEST_CASE("orbit series certification") {
    auto c0 = SpaceSpec::c0();
    auto rep = fhc_check(tg::a2(), c0, SeqVector<Rational>::unit(0));
    CHECK(rep.converges);
    CHECK(approx(rep.tail_bound) < 1e-9);
    // forward: 2 + 1 + 1/2 + ... -> 4; backward: 1/2 + 1/4 + ... -> 1
    CHECK(approx(rep.forward.partial_sum) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(approx(rep.backward.partial_sum) == doctest::Approx(1.0).epsilon(1e-6));

    auto rep1 = fhc_check(tg::constant(1), c0, SeqVector<Rational>::unit(0));
    CHECK(!rep1.converges);
    CHECK(!rep1.forward.converges);
    CHECK(!rep1.backward.converges);

    // contracting weights: forward series converges, backward diverges
    auto rep2 = fhc_check(tg::constant(1, 2), c0, SeqVector<Rational>::unit(0));
    CHECK(rep2.forward.converges);
    CHECK(!rep2.backward.converges);
    CHECK(!rep2.converges);
}

TEST_CASE("fhc series bounds dominate brute-force tails") {
    auto c0 = SpaceSpec::c0();
    auto w = tg::a2();
    for (Index d : {-2, 0, 3}) {
        auto y = SeqVector<Rational>::unit(d);
        auto rep = fhc_check(w, c0, y);
        REQUIRE(rep.converges);
        // extend the forward series far beyond the certified horizon
        Rational extra(0);
        SeqVector<Rational> cur = y;
        for (Index k = 1; k <= rep.forward.terms + 120; ++k) {
            cur = apply_backward_shift(w, cur);
            if (k > rep.forward.terms) extra += norm(c0, cur);
        }
        CHECK(extra <= rep.forward.tail_bound);
    }
}

TEST_CASE("report invariants tie the verdict fields together") {
    tg::Rng rng(73);
    for (int rep = 0; rep < 80; ++rep) {
        auto w = tg::random_classified_spec(rng, rep);
        auto r = classify_shadowing(w);
        const bool is_ab =
            r.shadowing_class == ShadowingClass::A || r.shadowing_class == ShadowingClass::B;
        CHECK((r.hyperbolic == TriState::yes) == is_ab);
        if (r.shadowing_class == ShadowingClass::C)
            CHECK(r.uniform_expansivity == UniformExpansivity::none);
        if (r.uniform_expansivity == UniformExpansivity::c)
            CHECK(r.shadowing_class == ShadowingClass::none);
    }
}
