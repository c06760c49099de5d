#pragma once

#include "shiftdyn/classify.hpp"
#include "shiftdyn/conjugacy.hpp"
#include "shiftdyn/shadowing.hpp"
#include "shiftdyn/version.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace shiftdyn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// scalar parsing: numbers, "p/q" / decimal strings, [re, im] pairs
// ---------------------------------------------------------------------------

template <class S>
S parse_scalar(const json& j);

template <>
inline double parse_scalar<double>(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return approx(rational_from_string(j.get<std::string>()));
    throw std::invalid_argument("expected a real scalar (number or string)");
}

template <>
inline Rational parse_scalar<Rational>(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return rational_from_double(j.get<double>());
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    throw std::invalid_argument("expected a rational scalar (number or string)");
}

template <>
inline std::complex<double> parse_scalar<std::complex<double>>(const json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw std::invalid_argument("complex scalar must be [re, im]");
        return {parse_scalar<double>(j[0]), parse_scalar<double>(j[1])};
    }
    return {parse_scalar<double>(j), 0.0};
}

inline json scalar_json(double x) { return x; }
inline json scalar_json(const Rational& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}
inline json scalar_json(const std::complex<double>& x) { return json::array({x.real(), x.imag()}); }

template <class R>
json real_json(const R& x) {
    if constexpr (std::is_same_v<R, Rational>) {
        return json{{"value", approx(x)}, {"exact", scalar_json(x)}};
    } else {
        return x;
    }
}

template <class R>
double real_value(const R& x) {
    return approx(x);
}

// ---------------------------------------------------------------------------
// weight-spec documents
// ---------------------------------------------------------------------------

template <class S>
WeightSequence<S> parse_weight_spec(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("weight spec: expected a JSON object");
    for (const char* key : {"left_tail", "core_start", "right_tail"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("weight spec: missing key '") + key + "'");
    auto parse_list = [&](const char* key) {
        std::vector<S> out;
        if (!j.contains(key)) return out;
        if (!j.at(key).is_array())
            throw std::invalid_argument(std::string("weight spec: '") + key + "' must be an array");
        for (const auto& e : j.at(key)) out.push_back(parse_scalar<S>(e));
        return out;
    };
    return WeightSequence<S>(parse_list("left_tail"), j.at("core_start").get<Index>(),
                             parse_list("core"), parse_list("right_tail"));
}

template <class S>
WeightSequence<S> parse_weight_spec_text(const std::string& text) {
    return parse_weight_spec<S>(json::parse(text));
}

template <class S>
json weight_spec_json(const WeightSequence<S>& w) {
    auto list = [](const std::vector<S>& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back(scalar_json(x));
        return a;
    };
    return json{{"scalar_field", scalar_traits<S>::is_complex ? "complex" : "real"},
                {"left_tail", list(w.left_tail())},
                {"core_start", w.core_start()},
                {"core", list(w.core())},
                {"right_tail", list(w.right_tail())}};
}

// ---------------------------------------------------------------------------
// vectors and trajectories
// ---------------------------------------------------------------------------

template <class S>
SeqVector<S> parse_seqvector(const json& j) {
    if (!j.is_object() || !j.contains("lo") || !j.contains("coeffs"))
        throw std::invalid_argument("vector: expected {lo, coeffs}");
    std::vector<S> c;
    for (const auto& e : j.at("coeffs")) c.push_back(parse_scalar<S>(e));
    return SeqVector<S>(j.at("lo").get<Index>(), std::move(c));
}

template <class S>
json seqvector_json(const SeqVector<S>& x) {
    json a = json::array();
    for (const auto& v : x.coeffs()) a.push_back(scalar_json(v));
    return json{{"lo", x.is_zero() ? 0 : x.lo()}, {"coeffs", a}};
}

inline ShiftOp parse_shift_op(const std::string& s) {
    if (s == "bilateral_backward") return ShiftOp::bilateral_backward;
    if (s == "unilateral_forward") return ShiftOp::unilateral_forward;
    throw std::invalid_argument("unknown operator tag: " + s);
}
inline const char* shift_op_name(ShiftOp op) {
    return op == ShiftOp::bilateral_backward ? "bilateral_backward" : "unilateral_forward";
}

template <class S>
PseudoTrajectory<S> parse_trajectory(const json& j) {
    PseudoTrajectory<S> t;
    if (!j.is_object() || !j.contains("n0") || !j.contains("delta") || !j.contains("points"))
        throw std::invalid_argument("trajectory: expected {n0, delta, points}");
    t.n0 = j.at("n0").get<Index>();
    t.delta = abs_of(parse_scalar<S>(j.at("delta")));
    if (j.contains("op")) t.op = parse_shift_op(j.at("op").get<std::string>());
    for (const auto& p : j.at("points")) t.points.push_back(parse_seqvector<S>(p));
    if (t.points.size() < 2) throw std::invalid_argument("trajectory: needs at least two points");
    return t;
}

template <class S>
json trajectory_json(const PseudoTrajectory<S>& t) {
    json pts = json::array();
    for (const auto& p : t.points) pts.push_back(seqvector_json(p));
    json out{{"n0", t.n0}, {"delta", real_value(t.delta)}, {"points", pts}};
    if constexpr (scalar_traits<S>::is_exact) out["delta_exact"] = scalar_json(t.delta);
    if (t.op != ShiftOp::bilateral_backward) out["op"] = shift_op_name(t.op);
    return out;
}

// ---------------------------------------------------------------------------
// perturbation maps
// ---------------------------------------------------------------------------

template <class S>
PerturbationMap<S> parse_perturbation(const json& j, const SpaceSpec& space) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("perturbation: expected {kind, ...}");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        return PerturbationMap<S>::constant(parse_seqvector<S>(j.at("vector")), space);
    }
    if (kind == "coordinate_rank_one") {
        return PerturbationMap<S>::coordinate_rank_one(
            j.at("functional_index").get<Index>(), parse_seqvector<S>(j.at("direction")),
            parse_scalar<S>(j.at("gain")), space);
    }
    if (kind == "cutoff_affine") {
        const auto& mw = j.at("matrix_window");
        std::vector<std::vector<S>> rows;
        for (const auto& r : mw.at("rows")) {
            std::vector<S> row;
            for (const auto& e : r) row.push_back(parse_scalar<S>(e));
            rows.push_back(std::move(row));
        }
        SeqVector<S> offset;
        if (mw.contains("offset")) offset = parse_seqvector<S>(mw.at("offset"));
        return PerturbationMap<S>::cutoff_affine(mw.at("row_lo").get<Index>(),
                                                 mw.at("col_lo").get<Index>(), std::move(rows),
                                                 std::move(offset), space);
    }
    throw std::invalid_argument("perturbation: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// report documents
// ---------------------------------------------------------------------------

inline json report_envelope(const std::string& subject, bool exact, const SpaceSpec& space,
                            double tolerance) {
    return json{{"tool", "shiftdyn"},
                {"version", version_string()},
                {"report", subject},
                {"arithmetic_mode", exact ? "exact" : "float"},
                {"space", space.name()},
                {"tolerance", tolerance}};
}

template <class R>
json rate_json(const GeometricRate<R>& g) {
    json out{{"value", g.value()}, {"period", g.len}};
    if constexpr (std::is_same_v<R, Rational>) out["period_product_exact"] = scalar_json(g.prod);
    else out["period_product"] = g.prod;
    return out;
}

template <class R>
json classification_json(const ClassificationReport<R>& rep) {
    json out{{"shadowing_class", to_string(rep.shadowing_class)},
             {"g_left", rate_json(rep.rates.left)},
             {"g_right", rate_json(rep.rates.right)},
             {"hyperbolic", to_string(rep.hyperbolic)},
             {"uniform_expansivity", to_string(rep.uniform_expansivity)},
             {"tolerance_used", rep.tolerance_used},
             {"arithmetic_mode", rep.exact_arithmetic ? "exact" : "float"}};
    if (!rep.boundary_quantity.empty()) {
        out["boundary"] =
            json{{"quantity", rep.boundary_quantity}, {"distance_to_one", rep.boundary_distance}};
    }
    return out;
}

template <class R>
json dichotomy_json(const DichotomyConstants<R>& d) {
    return json{{"beta", real_json(d.beta)}, {"s", real_json(d.s)}, {"C", real_json(d.c)},
                {"t", real_json(d.t)}};
}

template <class R>
json unilateral_sums_json(const UnilateralSumsReport<R>& r) {
    json out{{"q2", real_json(r.q2)},
             {"q2_n", r.q2_n},
             {"q3", r.q3 ? real_json(*r.q3) : json("infinite")},
             {"q4", r.q4 ? real_json(*r.q4) : json("infinite")},
             {"decisions",
              json{{"i", r.decision_i},
                   {"ii", r.decision_ii},
                   {"iii", r.decision_iii},
                   {"iv", r.decision_iv}}},
             {"boundary", r.boundary}};
    return out;
}

template <class S>
json shadow_result_json(const ShadowResult<S>& r) {
    json steps = json::array();
    for (const auto& e : r.per_step_errors) steps.push_back(real_value(e));
    json residuals = json::array();
    for (const auto& e : r.recurrence_residuals) residuals.push_back(real_value(e));
    return json{{"shadow_point", seqvector_json(r.shadow_point)},
                {"max_error", real_json(r.max_error)},
                {"error_bound", real_json(r.error_bound)},
                {"per_step_errors", steps},
                {"recurrence_residuals", residuals},
                {"constants", json{{"C", real_json(r.constants.c)}, {"t", real_json(r.constants.t)}}}};
}

template <class S>
json oracle_json(const OracleResult<S>& r) {
    return json{{"best_point", seqvector_json(r.best_point)},
                {"best_error", real_json(r.best_error)},
                {"lower_bound", real_json(r.lower_bound)},
                {"optimal", r.optimal}};
}

template <class S>
json verify_json(const VerifyReport<S>& r) {
    json steps = json::array();
    for (const auto& e : r.per_step_errors) steps.push_back(real_value(e));
    return json{{"shadows", r.shadows}, {"max_error", real_json(r.max_error)},
                {"per_step_errors", steps}};
}

template <class R>
json fhc_json(const FhcReport<R>& r) {
    auto series = [](const FhcSeries<R>& s) {
        return json{{"partial_sum", real_json(s.partial_sum)},
                    {"tail_bound", real_json(s.tail_bound)},
                    {"terms", s.terms},
                    {"converges", s.converges}};
    };
    return json{{"forward", series(r.forward)},
                {"backward", series(r.backward)},
                {"tail_bound", real_json(r.tail_bound)},
                {"converges", r.converges},
                {"boundary", r.boundary}};
}

template <class S>
json conjugacy_json(const ConjugacyResult<S>& r) {
    return json{{"point", seqvector_json(r.point)},
                {"image", seqvector_json(r.image)},
                {"series_tail_bound", real_value(r.series_tail_bound)},
                {"fixed_point_iterations", r.fixed_point_iterations},
                {"residual", real_value(r.residual)},
                {"iterate_diffs", r.iterate_diffs}};
}

// ---------------------------------------------------------------------------
// file helpers
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace shiftdyn
