#include "morrey/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "morrey/analysis.hpp"
#include "morrey/extremal1d.hpp"
#include "morrey/io.hpp"
#include "morrey/seminorm.hpp"
#include "morrey/solver.hpp"

namespace morrey {

namespace {

struct CommonOpts {
    std::string measure_path;
    double p = 0.0;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
};

struct SolveOpts {
    double box = 6.0;
    int res = 97;
    double tol = 1e-10;
    long max_iter = 200000;
    bool random_init = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--measure", c.measure_path, "measure JSON file")->required();
    sub->add_option("--p", c.p, "integrability exponent p (> n)")->required();
    sub->add_option("--out", c.out_path, "write the report here instead of stdout");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", c.seed, "seed for randomized sweeps");
}

void add_solver(CLI::App* sub, SolveOpts& s) {
    sub->add_option("--box", s.box, "grid half-width L");
    sub->add_option("--res", s.res, "grid resolution per axis");
    sub->add_option("--tol", s.tol, "relative energy-decrease stop tolerance");
    sub->add_option("--max-iter", s.max_iter, "iteration budget");
    sub->add_flag("--random-init", s.random_init, "random initial iterate");
}

void emit(const CommonOpts& c, const json& report, const std::string& csv = "") {
    std::string body = c.format == "csv" && !csv.empty() ? csv : report.dump(2) + "\n";
    if (c.out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(c.out_path);
        if (!out) throw std::runtime_error("cannot write file: " + c.out_path);
        out << body;
    }
}

SignedMeasure load_measure(const std::string& path) { return measure_from_json(load_json(path)); }

SolverConfig solver_config(const SolveOpts& s, const CommonOpts& c) {
    SolverConfig cfg;
    cfg.tol_stop = s.tol;
    cfg.max_iterations = s.max_iter;
    cfg.random_init = s.random_init;
    cfg.seed = c.seed;
    return cfg;
}

json solve_report(const SignedMeasure& rho, const Exponent& e, const SolveOpts& so,
                  const CommonOpts& c, std::optional<ExtremalResult>& er_out) {
    GridSpec gs{so.box, so.res};
    er_out.emplace(minimize(rho, e, gs, solver_config(so, c)));
    ExtremalResult& er = *er_out;
    BoundsReport bounds = check_bounds(er.field, rho);
    FarfieldReport far = farfield_check(er.field, rho);
    json rep{{"p", e.p()},
             {"n", e.n()},
             {"box", so.box},
             {"res", so.res},
             {"c", er.multiplier},
             {"energy", er.energy},
             {"seminorm", er.seminorm_value},
             {"cstar_estimate", er.cstar_estimate},
             {"el_residual", er.el_residual},
             {"iterations", er.iterations},
             {"maximizer", similarity_to_json(er.maximizer)},
             {"bounds",
              {{"global_min", bounds.global_min},
               {"global_max", bounds.global_max},
               {"support_min", bounds.support_min},
               {"support_max", bounds.support_max},
               {"upper_slack", bounds.upper_slack},
               {"lower_slack", bounds.lower_slack}}},
             {"farfield",
              {{"spread", far.spread},
               {"boundary_mean", far.boundary_mean},
               {"range", far.range}}}};
    if (far.two_atom) {
        rep["farfield"]["midpoint_value"] = far.midpoint_value;
        rep["farfield"]["mean_deviation"] = far.mean_deviation;
        const Vec& a = rho.atoms()[0].location;
        const Vec& b = rho.atoms()[1].location;
        std::vector<Vec> samples = symmetry_samples(er.field, midpoint_reflection(a, b));
        rep["antisymmetry_score"] =
            check_antisymmetry(er.field, rho, midpoint_reflection(a, b), samples);
        std::vector<Similarity> axials = axial_rotations(a, b, 1);
        if (!axials.empty()) {
            std::vector<Vec> s2 = symmetry_samples(er.field, axials.front());
            rep["symmetry_score"] = check_symmetry(er.field, rho, axials.front(), s2);
        }
    }
    DualityCertificate cert = duality_gap(rho, e, er);
    rep["duality"] = {{"flux_qnorm", cert.flux_qnorm},
                      {"primal", cert.primal_value},
                      {"gap", cert.gap},
                      {"cstar", cert.cstar}};
    return rep;
}

int cmd_extremal1d(const CommonOpts& c, int samples) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    PiecewiseLinear v = extremal_1d(rho, e);
    PiecewiseConstant f = distribution_function(rho);
    FarfieldLimits lim = farfield_limits_1d(v);
    std::vector<PiecewiseLinear> hats = hat_tests_at_atoms(rho);
    json rep{{"p", e.p()},
             {"q", e.q()},
             {"cstar", best_constant_1d(rho, e)},
             {"extremal", piecewise_linear_to_json(v)},
             {"distribution", piecewise_constant_to_json(f)},
             {"farfield", {{"left", lim.left}, {"right", lim.right}}},
             {"energy", v.grad_pnorm_pow(e.p())},
             {"weak_residual", weak_residual_1d(v, rho, e, hats)}};
    std::ostringstream csv;
    write_field_csv(csv, v, samples);
    emit(c, rep, csv.str());
    return 0;
}

int cmd_constant(const CommonOpts& c, const SolveOpts& so) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    json rep{{"p", e.p()}, {"n", e.n()}};
    if (rho.dim() == 1) {
        rep["cstar"] = best_constant_1d(rho, e);
        rep["method"] = "exact-1d";
        DualityCertificate cert = duality_gap(rho, e);
        rep["duality_gap"] = cert.gap;
    } else {
        std::optional<ExtremalResult> er;
        json solved = solve_report(rho, e, so, c, er);
        rep["cstar"] = er->cstar_estimate;
        rep["method"] = "solver-nd";
        rep["duality_bracket"] = {{"primal", solved["duality"]["primal"]},
                                  {"flux", solved["duality"]["flux_qnorm"]},
                                  {"cstar_flux", solved["duality"]["cstar"]}};
        rep["el_residual"] = er->el_residual;
    }
    emit(c, rep);
    return 0;
}

int cmd_seminorm(const CommonOpts& c, const std::string& field_path,
                 const std::string& trace_path, SearchConfig overrides, bool has_overrides) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    std::unique_ptr<ScalarField> field = field_from_json(load_json(field_path));
    SearchConfig cfg = SearchConfig::defaults(*field, rho);
    if (has_overrides) {
        if (overrides.lambda_min > 0.0) cfg.lambda_min = overrides.lambda_min;
        if (overrides.lambda_max > 0.0) cfg.lambda_max = overrides.lambda_max;
        cfg.lambda_count = overrides.lambda_count;
        cfg.z_count = overrides.z_count;
        if (overrides.orientation_count > 0) cfg.orientation_count = overrides.orientation_count;
        cfg.polish_iterations = overrides.polish_iterations;
        cfg.polish_starts = overrides.polish_starts;
    }
    cfg.record_trace = !trace_path.empty();
    SeminormResult sr = seminorm(*field, rho, e, cfg);
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw std::runtime_error("cannot write file: " + trace_path);
        write_trace_csv(out, sr.trace);
    }
    json rep{{"p", e.p()},
             {"value", sr.value},
             {"ratio_at_argmax", sr.ratio_at_argmax},
             {"argmax", similarity_to_json(sr.argmax)},
             {"evaluations", sr.trace.size()}};
    emit(c, rep);
    return 0;
}

int cmd_solve(const CommonOpts& c, const SolveOpts& so, const std::string& field_csv) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    std::optional<ExtremalResult> er;
    json rep = solve_report(rho, e, so, c, er);
    if (!field_csv.empty()) {
        std::ofstream out(field_csv);
        if (!out) throw std::runtime_error("cannot write file: " + field_csv);
        write_grid_csv(out, er->field);
    }
    emit(c, rep);
    return 0;
}

int cmd_stability(const CommonOpts& c, const std::string& field_path, double constant) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    if (rho.dim() != 1)
        throw ValidationError(ErrorCode::DimensionNotOne,
                              "the stability subcommand covers the exact 1D path");
    PiecewiseLinear v = piecewise_linear_from_json(load_json(field_path));
    double cst = constant > 0.0 ? constant : best_constant_1d(rho, e);
    MatchedExtremal1D matched = matched_extremal_1d(v, rho, e, SearchConfig::defaults(v, rho));
    StabilityReport rep = stability_deficit(v, rho, e, cst, matched);
    json out{{"p", e.p()},
             {"regime", rep.regime == StabilityRegime::HighP ? "p>2" : "1<p<=2"},
             {"constant", cst},
             {"lhs", rep.lhs},
             {"rhs", rep.rhs},
             {"slack", rep.slack},
             {"deficit", rep.deficit},
             {"seminorm", rep.seminorm_value},
             {"matched_extremal_scale", rep.matched_extremal_scale},
             {"maximizer", similarity_to_json(matched.maximizer)}};
    emit(c, out);
    return 0;
}

int cmd_duality(const CommonOpts& c, const SolveOpts& so) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    json rep{{"p", e.p()}, {"n", e.n()}};
    DualityCertificate cert;
    if (rho.dim() == 1) {
        cert = duality_gap(rho, e);
        PiecewiseLinear v = extremal_1d(rho, e);
        PiecewiseConstant flux = flux_from_extremal(v, 1.0, e);
        std::vector<PiecewiseLinear> hats = hat_tests_at_atoms(rho);
        rep["divergence_residual"] = divergence_residual(flux, rho, hats);
        rep["method"] = "exact-1d";
    } else {
        ExtremalResult er = minimize(rho, e, GridSpec{so.box, so.res}, solver_config(so, c));
        cert = duality_gap(rho, e, er);
        FluxField flux = flux_from_extremal(er.field, er.multiplier, e);
        rep["divergence_residual"] = divergence_residual(flux, rho);
        rep["el_residual"] = er.el_residual;
        rep["method"] = "solver-nd";
    }
    rep["flux_qnorm"] = cert.flux_qnorm;
    rep["primal"] = cert.primal_value;
    rep["gap"] = cert.gap;
    rep["moment_factor"] = cert.moment_factor;
    rep["cstar"] = cert.cstar;
    emit(c, rep);
    return 0;
}

struct CheckSink {
    int failures = 0;
    void operator()(const std::string& name, bool ok, double value) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << " = " << value << "\n";
        if (!ok) ++failures;
    }
};

int cmd_verify(const CommonOpts& c, int trials, const SolveOpts& so) {
    SignedMeasure rho = load_measure(c.measure_path);
    Exponent e(c.p, rho.dim());
    std::mt19937_64 rng(c.seed);
    CheckSink check;

    // Pushforward invariants under random similarities.
    {
        std::uniform_real_distribution<double> ul(-1.5, 1.5), uz(-2.0, 2.0), ua(0.0, 2.0 * M_PI);
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            double lambda = std::exp(ul(rng));
            Vec z(rho.dim());
            for (int d = 0; d < rho.dim(); ++d) z[d] = uz(rng);
            Similarity s = rho.dim() == 1   ? Similarity::line(lambda, t % 2 ? -1.0 : 1.0, z[0])
                           : rho.dim() == 2 ? Similarity::planar(lambda, ua(rng), t % 2, z)
                                            : Similarity::spatial(lambda, Vec{1.0, ua(rng), 0.5},
                                                                  ua(rng), t % 2, z);
            SignedMeasure pushed = pushforward(s, rho);
            double lhs = pushed.moment().norm();
            double rhs = lambda * rho.moment().norm();
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
        check("pushforward moment |moment(S#rho)| = lambda |moment| (rel)", worst < 1e-10, worst);
    }

    if (rho.dim() == 1) {
        PiecewiseLinear v = extremal_1d(rho, e);
        PiecewiseConstant f = distribution_function(rho);
        double qn = f.q_norm_pow(e.q());
        double en = v.grad_pnorm_pow(e.p());
        double iv = integrate(v, rho);
        check("energy identity |grad-energy - flux-energy|", std::abs(en - qn) < 1e-12 * qn,
              std::abs(en - qn));
        check("pairing identity |<v,rho> - flux-energy|", std::abs(iv - qn) < 1e-12 * qn,
              std::abs(iv - qn));

        std::vector<PiecewiseLinear> hats = hat_tests_at_atoms(rho);
        std::vector<PiecewiseLinear> uni =
            hat_tests_uniform(-rho.support_radius() - 1.0, rho.support_radius() + 1.0, 100);
        hats.insert(hats.end(), uni.begin(), uni.end());
        double wr = weak_residual_1d(v, rho, e, hats);
        check("weak residual of the exact extremal", wr < 1e-12, wr);

        double cstar = best_constant_1d(rho, e);
        SeminormResult sr = seminorm(v, rho, e, SearchConfig::defaults(v, rho));
        double loop = sr.value / std::pow(en, 1.0 / e.p());
        check("seminorm-to-energy ratio vs sharp constant (rel)",
              std::abs(loop - cstar) < 1e-6 * cstar, std::abs(loop - cstar) / cstar);

        // Generalized Morrey inequality on random fields.
        double lo = rho.support_box().lo[0] - 1.0, hi = rho.support_box().hi[0] + 1.0;
        double worst_gap = 0.0;
        bool ok = true;
        for (int t = 0; t < trials; ++t) {
            PiecewiseLinear w = random_piecewise_linear(rng, lo, hi, 6, 2.0);
            SeminormResult sw = seminorm(w, rho, e, SearchConfig::defaults(w, rho));
            double bound = cstar * std::pow(w.grad_pnorm_pow(e.p()), 1.0 / e.p());
            ok = ok && sw.value <= bound + 1e-8;
            worst_gap = std::max(worst_gap, sw.value - bound);
        }
        check("generalized Morrey inequality sweep (max excess)", ok, worst_gap);

        // Energy minimality among constrained competitors.
        bool min_ok = true;
        double worst_def = 0.0;
        for (int t = 0; t < trials; ++t) {
            PiecewiseLinear w = random_piecewise_linear(rng, lo, hi, 6, 2.0);
            double iw = integrate(w, rho);
            if (std::abs(iw) < 1e-8) continue;
            PiecewiseLinear scaled = w.scaled(iv / iw);
            double ew = scaled.grad_pnorm_pow(e.p());
            min_ok = min_ok && en <= ew + 1e-12;
            worst_def = std::max(worst_def, en - ew);
        }
        check("constrained energy minimality (max deficit)", min_ok, worst_def);

        // Stability in the regime matching p.
        bool st_ok = true;
        double worst_slack = 0.0;
        for (int t = 0; t < trials; ++t) {
            PiecewiseLinear w = random_piecewise_linear(rng, lo, hi, 5, 1.5);
            MatchedExtremal1D matched =
                matched_extremal_1d(w, rho, e, SearchConfig::defaults(w, rho));
            StabilityReport rep = stability_deficit(w, rho, e, cstar, matched);
            st_ok = st_ok && rep.slack >= -1e-8;
            worst_slack = std::min(worst_slack, rep.slack);
        }
        check("stability slack nonnegative (min slack)", st_ok, worst_slack);

        DualityCertificate cert = duality_gap(rho, e);
        check("duality gap", std::abs(cert.gap) < 1e-12, cert.gap);
        check("duality C* vs exact C*", cert.cstar == cstar, std::abs(cert.cstar - cstar));
    } else {
        ExtremalResult er = minimize(rho, e, GridSpec{so.box, so.res}, solver_config(so, c));
        check("EL residual (relative to c)", er.el_residual < 1e-3, er.el_residual);
        BoundsReport bounds = check_bounds(er.field, rho);
        check("max principle upper slack / range", bounds.upper_slack <= 1e-2 * bounds.range,
              bounds.upper_slack / bounds.range);
        check("max principle lower slack / range", bounds.lower_slack <= 1e-2 * bounds.range,
              bounds.lower_slack / bounds.range);
        FarfieldReport far = farfield_check(er.field, rho);
        check("far-field spread / range", far.spread <= 0.10 * far.range, far.spread / far.range);
        if (rho.size() == 2) {
            const Vec& a = rho.atoms()[0].location;
            const Vec& b = rho.atoms()[1].location;
            Similarity t = midpoint_reflection(a, b);
            std::vector<Vec> samples = symmetry_samples(er.field, t);
            double anti = check_antisymmetry(er.field, rho, t, samples);
            check("midpoint antisymmetry / range", anti <= 1e-2 * far.range, anti / far.range);
        }
        DualityCertificate cert = duality_gap(rho, e, er);
        check("duality gap / flux norm", std::abs(cert.gap) <= 0.01 * cert.flux_qnorm,
              cert.gap / cert.flux_qnorm);
    }
    return check.failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"generalized Morrey seminorms, extremals and sharp constants "
                 "for signed atomic measures"};
    app.require_subcommand(1);

    CommonOpts c1, c2, c3, c4, c5, c6, c7;
    SolveOpts so_c, so_s, so_d, so_v;
    int samples = 201;
    std::string field_path, trace_path, field_csv;
    double stability_constant = 0.0;
    int trials = 50;
    SearchConfig overrides;
    bool has_overrides = false;

    CLI::App* s_ext = app.add_subcommand("extremal1d", "exact 1D extremal and sharp constant");
    add_common(s_ext, c1);
    s_ext->add_option("--samples", samples, "CSV sample count");

    CLI::App* s_const = app.add_subcommand("constant", "sharp constant (exact 1D or solver nD)");
    add_common(s_const, c2);
    add_solver(s_const, so_c);

    CLI::App* s_semi = app.add_subcommand("seminorm", "similarity-group seminorm search");
    add_common(s_semi, c3);
    s_semi->add_option("--field", field_path, "field JSON file")->required();
    s_semi->add_option("--trace", trace_path, "search trace CSV output");
    auto mark = [&has_overrides](const std::string&) { has_overrides = true; };
    s_semi->add_option("--lambda-min", overrides.lambda_min)->each(mark);
    s_semi->add_option("--lambda-max", overrides.lambda_max)->each(mark);
    s_semi->add_option("--lambda-count", overrides.lambda_count)->each(mark);
    s_semi->add_option("--z-count", overrides.z_count)->each(mark);
    s_semi->add_option("--orient-count", overrides.orientation_count)->each(mark);
    s_semi->add_option("--polish-iters", overrides.polish_iterations)->each(mark);
    s_semi->add_option("--polish-starts", overrides.polish_starts)->each(mark);

    CLI::App* s_solve = app.add_subcommand("solve", "grid extremal for n >= 2");
    add_common(s_solve, c4);
    add_solver(s_solve, so_s);
    s_solve->add_option("--field-csv", field_csv, "write the field as CSV");

    CLI::App* s_stab = app.add_subcommand("stability", "stability deficit report (1D)");
    add_common(s_stab, c5);
    s_stab->add_option("--field", field_path, "field JSON file")->required();
    s_stab->add_option("--constant", stability_constant,
                       "constant C (default: exact sharp constant)");

    CLI::App* s_dual = app.add_subcommand("duality", "duality certificate");
    add_common(s_dual, c6);
    add_solver(s_dual, so_d);

    CLI::App* s_verify = app.add_subcommand("verify", "run the invariant suite on a measure");
    add_common(s_verify, c7);
    add_solver(s_verify, so_v);
    s_verify->add_option("--trials", trials, "random trials per sweep");
    so_v.res = 49;

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (s_ext->parsed()) return cmd_extremal1d(c1, samples);
        if (s_const->parsed()) return cmd_constant(c2, so_c);
        if (s_semi->parsed()) return cmd_seminorm(c3, field_path, trace_path, overrides, has_overrides);
        if (s_solve->parsed()) return cmd_solve(c4, so_s, field_csv);
        if (s_stab->parsed()) return cmd_stability(c5, field_path, stability_constant);
        if (s_dual->parsed()) return cmd_duality(c6, so_d);
        if (s_verify->parsed()) return cmd_verify(c7, trials, so_v);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        // p > n is a configuration contract, not a data defect
        return e.code() == ErrorCode::InvalidExponent ? 2 : 3;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace morrey
