// Command-line front end: classification, pseudo-orbit generation,
// shadowing, minimax oracle, conjugacy and series checks for bilateral
// weighted backward shifts. Machine-readable JSON goes to stdout, a short
// human summary to stderr.
//
// Exit status: 0 success, 1 boundary classification, 2 usage error,
// 3 numeric failure (budget exceeded, non-convergence, unsupported mode).

#include "shiftdyn/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <optional>

namespace sd = shiftdyn;
using sd::Index;
using sd::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBoundary = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

enum class Backend { real_float, real_exact, complex_float };

struct CommonOptions {
    std::string weights_path;
    std::string space = "c0";
    double tol = 1e-12;
    bool exact = false;
    std::string out_path;
    std::uint64_t seed = 1;
};

sd::SpaceSpec parse_space(const std::string& s) {
    if (s == "c0") return sd::SpaceSpec::c0();
    if (s.rfind("lp:", 0) == 0) return sd::SpaceSpec::lp(std::stod(s.substr(3)));
    throw CLI::ValidationError("--space", "expected c0 or lp:P");
}

std::pair<Index, Index> parse_window(const std::string& s) {
    auto colon = s.find(':', 1);  // allow a leading minus sign
    if (colon == std::string::npos)
        throw CLI::ValidationError("--window", "expected A:B");
    return {static_cast<Index>(std::stoll(s.substr(0, colon))),
            static_cast<Index>(std::stoll(s.substr(colon + 1)))};
}

std::map<std::string, Index> parse_params(const std::string& s) {
    std::map<std::string, Index> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--params", "expected k=v,k=v");
        out[item.substr(0, eq)] = static_cast<Index>(std::stoll(item.substr(eq + 1)));
    }
    return out;
}

Backend detect_backend(const json& weights_doc, bool exact) {
    std::string field = "real";
    if (weights_doc.contains("scalar_field"))
        field = weights_doc.at("scalar_field").get<std::string>();
    if (field == "complex") {
        if (exact)
            throw sd::numeric_failure(
                "exact arithmetic is not available for complex weights; drop --exact");
        return Backend::complex_float;
    }
    if (field != "real") throw std::invalid_argument("scalar_field must be 'real' or 'complex'");
    return exact ? Backend::real_exact : Backend::real_float;
}

template <class Fn>
int with_backend(Backend b, Fn&& fn) {
    switch (b) {
        case Backend::real_float: return fn.template operator()<double>();
        case Backend::real_exact: return fn.template operator()<sd::Rational>();
        case Backend::complex_float: return fn.template operator()<std::complex<double>>();
    }
    return kExitUsage;
}

void emit(const CommonOptions& common, const json& doc, const std::string& summary) {
    if (!common.out_path.empty())
        sd::write_json_file(common.out_path, doc);
    else
        std::cout << doc.dump(2) << "\n";
    std::cerr << summary << "\n";
}

template <class S>
sd::real_of<S> parse_delta(const std::string& text) {
    if constexpr (sd::scalar_traits<S>::is_exact) {
        return sd::abs_of(sd::rational_from_string(text));
    } else {
        return std::fabs(std::stod(text));
    }
}

// trajectory acquisition shared by shadow / oracle: a file path, "random",
// or "adversarial" (with --kind / --params)
struct TrajectorySpec {
    std::string source = "random";  // file path | random | adversarial
    std::string delta_text = "0.05";
    std::pair<Index, Index> window{-20, 20};
    Index support_radius = 6;
    std::string adversarial_kind = "bilateral_e0";
    std::map<std::string, Index> params;
};

template <class S>
sd::PseudoTrajectory<S> acquire_trajectory(const sd::WeightSequence<S>& w,
                                           const sd::SpaceSpec& space, const TrajectorySpec& spec,
                                           std::uint64_t seed) {
    if (spec.source == "random") {
        return sd::random_pseudotrajectory(w, space, parse_delta<S>(spec.delta_text),
                                           spec.window.first, spec.window.second, seed,
                                           spec.support_radius);
    }
    if (spec.source == "adversarial") {
        sd::AdversarialKind kind;
        if (spec.adversarial_kind == "backward_necessity")
            kind = sd::AdversarialKind::backward_necessity;
        else if (spec.adversarial_kind == "bilateral_e0")
            kind = sd::AdversarialKind::bilateral_e0;
        else if (spec.adversarial_kind == "forward_unilateral")
            kind = sd::AdversarialKind::forward_unilateral;
        else
            throw std::invalid_argument("unknown adversarial kind: " + spec.adversarial_kind);
        Index t = spec.params.count("t") ? spec.params.at("t") : 1;
        Index m = spec.params.count("m") ? spec.params.at("m") : 8;
        return sd::adversarial_pseudotrajectory(w, space, kind, parse_delta<S>(spec.delta_text), t,
                                                m);
    }
    json doc = sd::load_json_file(spec.source);
    if (doc.contains("trajectory")) doc = doc.at("trajectory");  // accept our own reports
    return sd::parse_trajectory<S>(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shiftdyn: shadowing, expansivity and conjugacy toolkit for weighted shifts"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string window_text = "-20:20";
    std::string params_text;
    std::string delta_text = "0.05";
    std::string kind = "random";
    std::string batch_dir;
    std::string alpha_path;
    std::string pseudo_source;
    std::string unilateral_dir;
    std::string point_path, y_path;
    std::string support_window_text;
    std::string method = "auto";
    Index support_radius = 6;
    Index y_index = 0;
    Index horizon = 60;
    Index normalization = 0;
    double bound = 4.0;
    double conj_tol = 1e-10;
    double tail_target = 1e-9;
    bool with_inverse = false;

    auto add_common = [&](CLI::App* cmd, bool needs_weights = true) {
        if (needs_weights) cmd->add_option("--weights", common.weights_path, "weight-spec JSON file");
        cmd->add_option("--space", common.space, "c0 or lp:P (default c0)");
        cmd->add_option("--tol", common.tol, "comparison tolerance (float mode)");
        cmd->add_flag("--exact", common.exact, "exact rational arithmetic");
        cmd->add_option("--out", common.out_path, "write the JSON report here instead of stdout");
        cmd->add_option("--seed", common.seed, "random seed");
    };

    auto* c_classify = app.add_subcommand("classify", "shadowing / expansivity classification");
    add_common(c_classify);
    c_classify->add_option("--batch", batch_dir, "classify every *.json weight spec in a directory");
    c_classify->add_option("--unilateral", unilateral_dir,
                           "classify the unilateral restriction (backward|forward)");

    auto* c_pseudo = app.add_subcommand("pseudo", "generate a pseudotrajectory");
    add_common(c_pseudo);
    c_pseudo->add_option("--kind", kind,
                         "random | backward_necessity | bilateral_e0 | forward_unilateral");
    c_pseudo->add_option("--delta", delta_text, "defect bound");
    c_pseudo->add_option("--window", window_text, "time window A:B (random kind)");
    c_pseudo->add_option("--support-radius", support_radius, "support radius of random draws");
    c_pseudo->add_option("--params", params_text, "adversarial parameters t=..,m=..");

    auto* c_shadow = app.add_subcommand("shadow", "shadow a pseudotrajectory by a true orbit");
    add_common(c_shadow);
    c_shadow->add_option("--pseudo", pseudo_source, "trajectory file, or 'random'/'adversarial'");
    c_shadow->add_option("--delta", delta_text, "defect bound for generated trajectories");
    c_shadow->add_option("--window", window_text, "time window A:B for generated trajectories");
    c_shadow->add_option("--support-radius", support_radius, "support radius of random draws");
    c_shadow->add_option("--kind", kind, "adversarial kind when --pseudo adversarial");
    c_shadow->add_option("--params", params_text, "adversarial parameters t=..,m=..");
    c_shadow->add_option("--method", method, "auto | positive | bilateral");

    auto* c_oracle = app.add_subcommand("oracle", "exact minimax shadow oracle");
    add_common(c_oracle);
    c_oracle->add_option("--pseudo", pseudo_source, "trajectory file, or 'random'/'adversarial'");
    c_oracle->add_option("--delta", delta_text, "defect bound for generated trajectories");
    c_oracle->add_option("--window", window_text, "time window A:B for generated trajectories");
    c_oracle->add_option("--support-radius", support_radius, "support radius of random draws");
    c_oracle->add_option("--kind", kind, "adversarial kind when --pseudo adversarial");
    c_oracle->add_option("--params", params_text, "adversarial parameters t=..,m=..");
    c_oracle->add_option("--support-window", support_window_text,
                         "candidate support window A:B (default: automatic)");

    auto* c_conjugate = app.add_subcommand("conjugate", "structural-stability conjugacy h = I + u");
    add_common(c_conjugate);
    c_conjugate->add_option("--alpha", alpha_path, "perturbation JSON file")->required();
    c_conjugate->add_option("--point", point_path, "evaluation point JSON (default e_0)");
    c_conjugate->add_option("--conj-tol", conj_tol, "fixed-point / series tolerance");
    c_conjugate->add_flag("--with-inverse", with_inverse, "also evaluate h' and the round trip");
    c_conjugate->add_option("--normalization", normalization,
                            "pin this coordinate of u to zero (default 0)");

    auto* c_fhc = app.add_subcommand("fhc", "orbit-series convergence certification");
    add_common(c_fhc);
    c_fhc->add_option("--y", y_path, "vector JSON file (default a basis vector)");
    c_fhc->add_option("--y-index", y_index, "basis vector index when --y is absent");
    c_fhc->add_option("--tail-target", tail_target, "certified tail target");

    auto* c_exp = app.add_subcommand("expansivity", "uniform expansivity class and orbit witness");
    add_common(c_exp);
    c_exp->add_option("--horizon", horizon, "orbit window for the witness search");
    c_exp->add_option("--bound", bound, "orbit sup bound for the witness search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!(common.tol > 0)) throw std::invalid_argument("--tol must be > 0");
        const sd::SpaceSpec space = parse_space(common.space);
        const sd::Tolerance tol{common.tol};

        // ------------------------------------------------------ classify ---
        if (c_classify->parsed()) {
            if (!batch_dir.empty()) {
                std::vector<std::filesystem::path> files;
                for (const auto& ent : std::filesystem::directory_iterator(batch_dir))
                    if (ent.path().extension() == ".json") files.push_back(ent.path());
                std::sort(files.begin(), files.end());
                std::vector<std::future<json>> futs;
                for (const auto& f : files) {
                    futs.push_back(std::async(std::launch::async, [&, f]() -> json {
                        json entry{{"file", f.filename().string()}};
                        try {
                            json doc = sd::load_json_file(f.string());
                            with_backend(detect_backend(doc, common.exact), [&]<class S>() {
                                auto w = sd::parse_weight_spec<S>(doc);
                                entry["classification"] =
                                    classification_json(classify_shadowing(w, tol));
                                return 0;
                            });
                        } catch (const std::exception& e) {
                            entry["error"] = e.what();  // bad files don't abort the batch
                        }
                        return entry;
                    }));
                }
                json arr = json::array();
                bool any_boundary = false;
                for (auto& fu : futs) {
                    json e = fu.get();
                    any_boundary =
                        any_boundary || (e.contains("classification") &&
                                         e["classification"]["shadowing_class"] == "BOUNDARY");
                    arr.push_back(std::move(e));
                }
                json doc = report_envelope("classify-batch", common.exact, space, common.tol);
                doc["results"] = arr;
                emit(common, doc, "classified " + std::to_string(arr.size()) + " weight specs");
                return any_boundary ? kExitBoundary : kExitOk;
            }
            if (common.weights_path.empty())
                throw std::invalid_argument("classify: --weights or --batch is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                json doc = report_envelope("classify", common.exact, space, common.tol);
                auto rep = classify_shadowing(w, tol);
                doc["classification"] = classification_json(rep);
                if (!unilateral_dir.empty()) {
                    auto dir = unilateral_dir == "forward" ? sd::UnilateralDirection::forward
                                                           : sd::UnilateralDirection::backward;
                    auto uni = sd::unilateral_part(w);
                    doc["unilateral"] = json{
                        {"direction", unilateral_dir},
                        {"class", to_string(classify_unilateral(uni, dir, tol))},
                        {"sums", unilateral_sums_json(unilateral_sums(uni, 64, tol))}};
                }
                if (rep.shadowing_class == sd::ShadowingClass::C)
                    doc["dichotomy_constants"] = dichotomy_json(sd::dichotomy_constants(w, tol));
                emit(common, doc,
                     std::string("shadowing class ") + to_string(rep.shadowing_class));
                return rep.shadowing_class == sd::ShadowingClass::boundary ? kExitBoundary
                                                                           : kExitOk;
            });
        }

        // -------------------------------------------------------- pseudo ---
        if (c_pseudo->parsed()) {
            if (common.weights_path.empty())
                throw std::invalid_argument("pseudo: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                TrajectorySpec tspec;
                tspec.source = kind == "random" ? "random" : "adversarial";
                tspec.adversarial_kind = kind;
                tspec.delta_text = delta_text;
                tspec.window = parse_window(window_text);
                tspec.support_radius = support_radius;
                tspec.params = parse_params(params_text);
                auto traj = acquire_trajectory(w, space, tspec, common.seed);
                json doc = report_envelope("pseudotrajectory", common.exact, space, common.tol);
                doc["trajectory"] = trajectory_json(traj);
                doc["defect"] = sd::real_value(defect(w, space, traj));
                emit(common, doc,
                     "generated " + std::to_string(traj.points.size()) + " points, defect <= " +
                         std::to_string(sd::real_value(traj.delta)));
                return kExitOk;
            });
        }

        // -------------------------------------------------------- shadow ---
        if (c_shadow->parsed()) {
            if (common.weights_path.empty())
                throw std::invalid_argument("shadow: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                TrajectorySpec tspec;
                tspec.source = pseudo_source.empty() ? "random" : pseudo_source;
                tspec.adversarial_kind = kind;
                tspec.delta_text = delta_text;
                tspec.window = parse_window(window_text);
                tspec.support_radius = support_radius;
                tspec.params = parse_params(params_text);
                auto traj = acquire_trajectory(w, space, tspec, common.seed);
                bool positive = method == "positive" || (method == "auto" && traj.n0 > 0) ||
                                (method == "auto" && traj.n0 == 0);
                auto res = positive ? shadow_positive(w, space, traj, tol)
                                    : shadow_bilateral(w, space, traj, tol);
                json doc = report_envelope("shadow", common.exact, space, common.tol);
                doc["method"] = positive ? "positive" : "bilateral";
                doc["trajectory_defect"] = sd::real_value(defect(w, space, traj));
                doc["result"] = shadow_result_json(res);
                emit(common, doc,
                     "max_error " + std::to_string(sd::real_value(res.max_error)) +
                         " <= bound " + std::to_string(sd::real_value(res.error_bound)));
                return kExitOk;
            });
        }

        // -------------------------------------------------------- oracle ---
        if (c_oracle->parsed()) {
            if (common.weights_path.empty())
                throw std::invalid_argument("oracle: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                TrajectorySpec tspec;
                tspec.source = pseudo_source.empty() ? "random" : pseudo_source;
                tspec.adversarial_kind = kind;
                tspec.delta_text = delta_text;
                tspec.window = parse_window(window_text);
                tspec.support_radius = support_radius;
                tspec.params = parse_params(params_text);
                auto traj = acquire_trajectory(w, space, tspec, common.seed);
                sd::OracleResult<S> res;
                if (!support_window_text.empty()) {
                    auto sw = parse_window(support_window_text);
                    res = oracle_best_shadow(w, space, traj, sw.first, sw.second);
                } else {
                    res = oracle_best_shadow(w, space, traj);
                }
                json doc = report_envelope("oracle", common.exact, space, common.tol);
                doc["result"] = oracle_json(res);
                doc["verify"] = verify_json(
                    verify_shadow(w, space, traj, res.best_point,
                                  sd::real_of<S>(res.best_error + sd::real_of<S>(1))));
                emit(common, doc,
                     "best_error " + std::to_string(sd::real_value(res.best_error)) +
                         " (lower bound " + std::to_string(sd::real_value(res.lower_bound)) + ")");
                return kExitOk;
            });
        }

        // ----------------------------------------------------- conjugate ---
        if (c_conjugate->parsed()) {
            if (common.weights_path.empty())
                throw std::invalid_argument("conjugate: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                auto alpha = sd::parse_perturbation<S>(sd::load_json_file(alpha_path), space);
                sd::SeqVector<S> x = point_path.empty()
                                         ? sd::SeqVector<S>::unit(0)
                                         : sd::parse_seqvector<S>(sd::load_json_file(point_path));
                auto fwd = conjugate_forward(w, space, alpha, x, conj_tol, normalization, tol);
                json doc = report_envelope("conjugate", common.exact, space, common.tol);
                doc["epsilon_budget"] = sd::real_value(epsilon_budget(w, space, tol));
                doc["forward"] = conjugacy_json(fwd);
                if (with_inverse) {
                    auto inv =
                        conjugate_inverse(w, space, alpha, fwd.image, conj_tol, normalization, tol);
                    doc["inverse"] = conjugacy_json(inv);
                    sd::SeqVector<S> rt = inv.image - x;
                    doc["round_trip_error"] = sd::real_value(norm(space, rt));
                }
                emit(common, doc,
                     "residual " + std::to_string(sd::real_value(fwd.residual)) + " after " +
                         std::to_string(fwd.fixed_point_iterations) + " iterations");
                return kExitOk;
            });
        }

        // ----------------------------------------------------------- fhc ---
        if (c_fhc->parsed()) {
            if (common.weights_path.empty()) throw std::invalid_argument("fhc: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                sd::SeqVector<S> y = y_path.empty()
                                         ? sd::SeqVector<S>::unit(y_index)
                                         : sd::parse_seqvector<S>(sd::load_json_file(y_path));
                auto rep = fhc_check(w, space, y, tail_target, tol);
                json doc = report_envelope("fhc", common.exact, space, common.tol);
                doc["result"] = fhc_json(rep);
                emit(common, doc,
                     rep.converges ? "both orbit series converge" : "series divergence detected");
                return kExitOk;
            });
        }

        // ---------------------------------------------------- expansivity ---
        if (c_exp->parsed()) {
            if (common.weights_path.empty())
                throw std::invalid_argument("expansivity: --weights is required");
            json wdoc = sd::load_json_file(common.weights_path);
            return with_backend(detect_backend(wdoc, common.exact), [&]<class S>() {
                auto w = sd::parse_weight_spec<S>(wdoc);
                auto ue = uniform_expansivity_class(w, tol);
                json doc = report_envelope("expansivity", common.exact, space, common.tol);
                doc["uniform_expansivity"] = to_string(ue);
                auto witness = bounded_orbit_witness(
                    w, space, horizon, sd::real_from_double<sd::real_of<S>>(bound));
                doc["bounded_orbit_witness"] =
                    witness ? json{{"found", true}, {"vector", seqvector_json(*witness)}}
                            : json{{"found", false}};
                doc["witness_horizon"] = horizon;
                doc["witness_bound"] = bound;
                emit(common, doc, std::string("uniform expansivity class ") + to_string(ue));
                return ue == sd::UniformExpansivity::boundary ? kExitBoundary : kExitOk;
            });
        }
        return kExitUsage;
    } catch (const sd::numeric_failure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
