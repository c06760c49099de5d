#pragma once

#include "shiftdyn/weights.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace shiftdyn {

// ---------------------------------------------------------------------------
// SpaceSpec: c0(Z) with the supremum norm, or lp(Z) with the p-norm.
// ---------------------------------------------------------------------------

struct SpaceSpec {
    enum class Kind { c0, lp };
    Kind kind = Kind::c0;
    double p = 1.0;

    static SpaceSpec c0() { return {Kind::c0, 0.0}; }
    static SpaceSpec lp(double p) {
        if (!(p >= 1.0)) throw std::invalid_argument("lp space requires p >= 1");
        return {Kind::lp, p};
    }
    bool is_sup() const { return kind == Kind::c0; }
    bool is_l1() const { return kind == Kind::lp && p == 1.0; }
    std::string name() const {
        if (is_sup()) return "c0";
        return "lp:" + std::to_string(p);
    }
};

// ---------------------------------------------------------------------------
// SeqVector: finitely supported element of a bilateral sequence space.
// Stored as a support window [lo, lo + coeffs.size()) with leading/trailing
// zeros trimmed after every operation.
// ---------------------------------------------------------------------------

template <class S>
class SeqVector {
  public:
    using real_t = real_of<S>;

    SeqVector() = default;
    SeqVector(Index lo, std::vector<S> coeffs) : lo_(lo), c_(std::move(coeffs)) { trim(); }

    static SeqVector zero() { return {}; }
    static SeqVector unit(Index n, S v = S(1)) { return SeqVector(n, {std::move(v)}); }

    bool is_zero() const { return c_.empty(); }
    Index lo() const { return lo_; }
    Index hi() const { return lo_ + static_cast<Index>(c_.size()) - 1; }  // valid if nonzero
    std::size_t support_size() const { return c_.size(); }
    const std::vector<S>& coeffs() const { return c_; }

    S at(Index n) const {
        if (c_.empty() || n < lo_ || n > hi()) return S(0);
        return c_[static_cast<std::size_t>(n - lo_)];
    }

    void set(Index n, S v) {
        if (c_.empty()) {
            lo_ = n;
            c_.push_back(std::move(v));
        } else if (n < lo_) {
            c_.insert(c_.begin(), static_cast<std::size_t>(lo_ - n), S(0));
            lo_ = n;
            c_[0] = std::move(v);
        } else if (n > hi()) {
            c_.resize(static_cast<std::size_t>(n - lo_ + 1), S(0));
            c_.back() = std::move(v);
        } else {
            c_[static_cast<std::size_t>(n - lo_)] = std::move(v);
        }
        trim();
    }

    SeqVector& operator+=(const SeqVector& o) { return axpy(S(1), o); }
    SeqVector& operator-=(const SeqVector& o) { return axpy(S(-1), o); }

    SeqVector& axpy(const S& a, const SeqVector& o) {
        if (o.c_.empty() || a == S(0)) return *this;
        if (c_.empty()) {
            lo_ = o.lo_;
            c_.assign(o.c_.size(), S(0));
        } else {
            Index nlo = std::min(lo_, o.lo_);
            Index nhi = std::max(hi(), o.hi());
            if (nlo < lo_) {
                c_.insert(c_.begin(), static_cast<std::size_t>(lo_ - nlo), S(0));
                lo_ = nlo;
            }
            if (nhi > hi()) c_.resize(static_cast<std::size_t>(nhi - lo_ + 1), S(0));
        }
        for (std::size_t i = 0; i < o.c_.size(); ++i)
            c_[static_cast<std::size_t>(o.lo_ + static_cast<Index>(i) - lo_)] += a * o.c_[i];
        trim();
        return *this;
    }

    SeqVector& scale(const S& a) {
        if (a == S(0)) {
            c_.clear();
            return *this;
        }
        for (auto& x : c_) x *= a;
        return *this;
    }

    friend SeqVector operator+(SeqVector a, const SeqVector& b) { return a += b; }
    friend SeqVector operator-(SeqVector a, const SeqVector& b) { return a -= b; }
    friend SeqVector operator*(const S& a, SeqVector v) { return v.scale(a); }

    bool operator==(const SeqVector& o) const { return lo_ == o.lo_ && c_ == o.c_; }

    /// Support translated right by k: result(n + k) = this(n).
    SeqVector translated(Index k) const {
        if (c_.empty()) return {};
        return SeqVector(lo_ + k, c_);
    }

  private:
    void trim() {
        std::size_t b = 0, e = c_.size();
        while (b < e && c_[b] == S(0)) ++b;
        while (e > b && c_[e - 1] == S(0)) --e;
        if (b == e) {
            c_.clear();
            lo_ = 0;
            return;
        }
        if (b > 0 || e < c_.size()) {
            std::vector<S> t(c_.begin() + static_cast<std::ptrdiff_t>(b),
                             c_.begin() + static_cast<std::ptrdiff_t>(e));
            lo_ += static_cast<Index>(b);
            c_ = std::move(t);
        }
    }

    Index lo_ = 0;
    std::vector<S> c_;
};

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

/// Exact norm where the value is exactly representable (sup and l1 always;
/// lp for support size <= 1). For other p the rational backend refuses
/// rather than return a falsely exact value; float backends use std::pow.
template <class S>
real_of<S> norm(const SpaceSpec& space, const SeqVector<S>& x) {
    using R = real_of<S>;
    if (x.is_zero()) return R(0);
    if (space.is_sup()) {
        R m(0);
        for (const auto& v : x.coeffs()) m = std::max(m, abs_of(v));
        return m;
    }
    if (space.is_l1() || x.support_size() == 1) {
        R s(0);
        for (const auto& v : x.coeffs()) s += abs_of(v);
        return s;
    }
    if constexpr (scalar_traits<S>::is_exact) {
        throw std::domain_error(
            "norm: lp (p != 1) norms are not exactly representable in rational mode; "
            "use c0, l1 or float arithmetic");
    } else {
        double s = 0;
        for (const auto& v : x.coeffs()) s += std::pow(abs_of(v), space.p);
        return std::pow(s, 1.0 / space.p);
    }
}

// ---------------------------------------------------------------------------
// shift application
// ---------------------------------------------------------------------------

/// One application of the bilateral weighted backward shift:
/// maps e_k to w_k e_{k-1}.
template <class S>
SeqVector<S> apply_backward_shift(const WeightSequence<S>& w, const SeqVector<S>& x) {
    if (x.is_zero()) return {};
    std::vector<S> c(x.coeffs());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= w.at(x.lo() + static_cast<Index>(i));
    return SeqVector<S>(x.lo() - 1, std::move(c));
}

/// One application of the inverse: maps e_k to e_{k+1} / w_{k+1}.
template <class S>
SeqVector<S> apply_backward_shift_inverse(const WeightSequence<S>& w, const SeqVector<S>& x) {
    if (x.is_zero()) return {};
    std::vector<S> c(x.coeffs());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] /= w.at(x.lo() + static_cast<Index>(i) + 1);
    return SeqVector<S>(x.lo() + 1, std::move(c));
}

/// n-th iterate (negative n uses the inverse). Each coefficient is scaled
/// by one full weight product, so a forward/backward round trip restores
/// the input exactly in rational mode.
template <class S>
SeqVector<S> iterate(const WeightSequence<S>& w, const SeqVector<S>& x, Index n) {
    if (x.is_zero() || n == 0) return x;
    std::vector<S> c(x.coeffs());
    if (n > 0) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            Index d = x.lo() + static_cast<Index>(i);
            c[i] *= w.product(d - n + 1, d);
        }
        return SeqVector<S>(x.lo() - n, std::move(c));
    }
    Index k = -n;
    for (std::size_t i = 0; i < c.size(); ++i) {
        Index d = x.lo() + static_cast<Index>(i);
        c[i] /= w.product(d + 1, d + k);
    }
    return SeqVector<S>(x.lo() + k, std::move(c));
}

/// One application of the unilateral weighted forward shift on indices
/// 1, 2, ...: maps e_k to w_k e_{k+1}.
template <class S>
SeqVector<S> apply_forward_shift(const WeightSequence<S>& w, const SeqVector<S>& x) {
    if (x.is_zero()) return {};
    if (x.lo() < 1) throw std::domain_error("forward shift: vector must be supported in n >= 1");
    std::vector<S> c(x.coeffs());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= w.at(x.lo() + static_cast<Index>(i));
    return SeqVector<S>(x.lo() + 1, std::move(c));
}

// ---------------------------------------------------------------------------
// index splitting x = x_M + x_N with x_M supported in n <= 0 and x_N in
// n >= 1. Both coordinate projections have norm 1 in c0 and every lp.
// ---------------------------------------------------------------------------

template <class S>
std::pair<SeqVector<S>, SeqVector<S>> split_MN(const SeqVector<S>& x) {
    SeqVector<S> m, n;
    if (x.is_zero()) return {m, n};
    std::vector<S> mc, nc;
    Index mlo = x.lo(), nlo = 1;
    for (Index i = x.lo(); i <= x.hi(); ++i) {
        if (i <= 0)
            mc.push_back(x.at(i));
        else {
            if (nc.empty()) nlo = i;
            nc.push_back(x.at(i));
        }
    }
    return {SeqVector<S>(mlo, std::move(mc)), SeqVector<S>(nlo, std::move(nc))};
}

}  // namespace shiftdyn
