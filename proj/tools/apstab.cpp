// apstab: strong-stability analysis of x' = A(t) x with trigonometric-
// polynomial almost periodic coefficients. Commands map one-to-one onto the
// library's analysis entry points; output is a JSON report plus optional CSV.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "apstab/apstab.hpp"

namespace {

using namespace apstab;

struct CliOptions {
    std::string problem_path;
    std::string out_path;
    std::string csv_dir;
    std::optional<double> tol;
    std::optional<double> horizon;
    std::optional<long> bound;
    std::string alphas_csv;
};

struct PendingArtifacts {
    std::vector<std::pair<std::string, std::string>> files;  // (path, content)

    void add(const std::string& path, const std::string& content) { files.emplace_back(path, content); }
    void flush() const {
        for (const auto& [path, content] : files) {
            std::filesystem::create_directories(std::filesystem::path(path).parent_path());
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << content;
        }
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(path, "cannot open problem file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Rational> parse_alpha_list(const std::string& csv) {
    std::vector<Rational> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_decimal(item));
    }
    if (out.empty()) throw SchemaError("--alphas", "empty alpha list");
    return out;
}

void apply_overrides(ProblemFile& problem, const CliOptions& cli) {
    if (cli.tol) problem.analysis.tol = cli.tol;
    if (cli.horizon) problem.analysis.horizon = cli.horizon;
    if (cli.bound) {
        if (*cli.bound < 0) throw SchemaError("--bound", "must be nonnegative");
        problem.analysis.bound = static_cast<unsigned long>(*cli.bound);
    }
    if (!cli.alphas_csv.empty()) problem.analysis.alphas = parse_alpha_list(cli.alphas_csv);
}

ConditionRecord record_from(const std::string& name, const std::string& anchor, CheckStatus status,
                            std::map<std::string, double> evidence = {}, std::string notes = {}) {
    ConditionRecord rec;
    rec.name = name;
    rec.anchor = anchor;
    rec.status = status;
    rec.evidence = std::move(evidence);
    rec.notes = std::move(notes);
    return rec;
}

SemiModule coefficient_semimodule(const ProblemFile& problem) {
    auto spectrum = problem.a.pooled_spectrum();
    return SemiModule::from_spectrum(problem.basis, spectrum);
}

std::vector<Rational> effective_alphas(const ProblemFile& problem) {
    if (!problem.analysis.alphas.empty()) return problem.analysis.alphas;
    return {Rational(1), Rational(1, 10), Rational(1, 100)};
}

ScalarEquation make_scalar_equation(const ProblemFile& problem) {
    if (!problem.is_scalar())
        throw SchemaError("dimension", "this command analyzes scalar problems (dimension 1)");
    return ScalarEquation(problem.scalar_coefficient());
}

std::string csv_path(const CliOptions& cli, const std::string& name) {
    return (std::filesystem::path(cli.csv_dir) / name).string();
}

// ---------------------------------------------------------------- commands

void run_semimodule(const ProblemFile& problem, Report& report, const CliOptions&, PendingArtifacts&) {
    SemiModule lambda = coefficient_semimodule(problem);
    unsigned long bound = problem.analysis.bound.value_or(kDefaultSearchBound);
    Rational eps = problem.analysis.eps.value_or(kDefaultDiscretenessEps);

    auto module_check = lambda.module_check(std::min<unsigned long>(bound, 200));
    auto disc = lambda.discreteness_check(bound, eps);

    report.details["generator_count"] = lambda.generators().size();
    Json gens = Json::array();
    for (const auto& g : lambda.generators()) gens.push_back(schema::frequency_to_json(g));
    report.details["generators"] = gens;

    std::string module_kind = module_check.kind == ModuleKind::Module ? "module"
                              : module_check.kind == ModuleKind::SemiModuleOnly
                                  ? "semi_module_only"
                                  : "not_module_within_bound";
    report.details["module_check"] = module_kind;
    report.conditions.push_back(record_from(
        "module_check", "for every generator g, -g lies in sm(generators)",
        module_check.kind == ModuleKind::Module ? CheckStatus::Pass : CheckStatus::Info,
        {{"generators", double(lambda.generators().size())}}, module_check.certificate));

    std::map<std::string, double> ev{{"bound", double(disc.bound)}, {"eps", apstab::to_double(disc.eps)}};
    std::string verdict;
    switch (disc.verdict) {
        case Discreteness::Discrete: verdict = "discrete"; break;
        case Discreteness::NonDiscrete: verdict = "non_discrete"; break;
        case Discreteness::Unknown: verdict = "unknown"; break;
    }
    if (disc.witness) {
        ev["witness_value"] = disc.witness->to_double();
        Json coeffs = Json::array();
        for (const auto& c : disc.witness_coeffs) coeffs.push_back(c.convert_to<long long>());
        report.details["witness_coefficients"] = coeffs;
        report.details["witness"] = schema::frequency_to_json(*disc.witness);
    }
    report.conditions.push_back(record_from("discreteness",
                                            "sm(sigma_b(A)) has no nonzero element within eps of zero",
                                            disc.verdict == Discreteness::Discrete ? CheckStatus::Pass
                                                                                   : CheckStatus::Info,
                                            ev, disc.reason));
    report.details["discreteness"] = verdict;
    report.verdict = verdict;
}

void run_spectrum(const ProblemFile& problem, Report& report, const CliOptions&, PendingArtifacts&) {
    Json spec = Json::array();
    for (const auto& f : problem.a.pooled_spectrum()) spec.push_back(schema::frequency_to_json(f));
    report.details["bohr_spectrum"] = spec;
    report.details["spectrum_size"] = problem.a.pooled_spectrum().size();

    if (!problem.is_scalar()) {
        report.verdict = "spectrum_enumerated";
        report.conditions.push_back(record_from("bohr_spectrum", "sigma_b(A) is the exact frequency set",
                                                CheckStatus::Info,
                                                {{"size", double(problem.a.pooled_spectrum().size())}}));
        return;
    }

    ScalarEquation eq = make_scalar_equation(problem);
    SpectrumBounds bounds;
    if (problem.analysis.bound) bounds.membership_bound = *problem.analysis.bound;
    if (problem.analysis.eps) bounds.eps = *problem.analysis.eps;
    SpectrumReport sr(eq, bounds);

    auto mean = eq.mean().to_complex();
    report.details["mean"] = Json{{"re", mean.real()}, {"im", mean.imag()}};
    report.details["route"] = to_string(sr.route());
    report.details["zero_in_spectrum"] = sr.zero_in_spectrum();
    report.conditions.push_back(record_from(
        "spectrum_localization", "Sigma is contained in -i Lambda union i Lambda (or i Lambda)",
        sr.conclusion_applicable() ? CheckStatus::Pass : CheckStatus::NotApplicable,
        {{"discrete", sr.discreteness().verdict == Discreteness::Discrete ? 1.0 : 0.0}}, sr.description()));

    if (!problem.analysis.candidates.empty()) {
        Json cands = Json::array();
        for (const auto& beta : problem.analysis.candidates) {
            auto c = sr.candidate(beta);
            Json entry;
            entry["beta"] = schema::frequency_to_json(beta);
            entry["in_candidate_set"] = c.in_candidate_set;
            entry["positive_member"] = c.positive.member;
            entry["negative_member"] = c.negative.member;
            cands.push_back(entry);
        }
        report.details["candidates"] = cands;
    }
    report.verdict = sr.conclusion_applicable() ? "localized" : "not_localized";
}

void run_solve(const ProblemFile& problem, Report& report, const CliOptions& cli, PendingArtifacts& art) {
    ScalarEquation eq = make_scalar_equation(problem);
    if (!problem.analysis.lambda) throw SchemaError("analysis.lambda", "solve requires a lambda");
    if (!problem.forcing) throw SchemaError("forcing", "solve requires a forcing term");
    TrigPoly f = problem.forcing->at(0, 0);

    ResolventOptions opt;
    opt.expand_solution = true;
    if (problem.analysis.tol) opt.tol = rational_from_double(*problem.analysis.tol);
    ResolventSolution sol = solve_resolvent(eq, *problem.analysis.lambda, f, opt);

    double horizon = problem.analysis.horizon.value_or(50.0);
    auto times = sample_times(200, horizon);
    double max_res = sol.max_residual(times);

    report.details["sup_norm_bound"] = apstab::to_double(sol.sup_norm_bound());
    report.details["residual_bound"] = apstab::to_double(sol.residual_bound());
    report.details["max_residual_on_samples"] = max_res;
    report.details["uniqueness"] = sol.uniqueness_justification();
    report.details["solution_terms"] = sol.expanded().approx.term_count();

    report.conditions.push_back(record_from(
        "resolvent_residual", "u' - (a - lambda) u - f vanishes within the certified bound",
        max_res <= apstab::to_double(sol.residual_bound()) + 1e-12 ? CheckStatus::Pass : CheckStatus::Fail,
        {{"max_residual", max_res}, {"bound", apstab::to_double(sol.residual_bound())}}));
    report.conditions.push_back(record_from("unique_bounded_solution",
                                            "unique bounded solution for Re(lambda) > Re(mean)",
                                            CheckStatus::Pass, {}, sol.uniqueness_justification()));

    if (!cli.csv_dir.empty()) {
        std::ostringstream csv;
        csv << "t,re,im,abs\n";
        for (double t : times) {
            auto u = sol.eval(t);
            csv << t << "," << u.real() << "," << u.imag() << "," << std::abs(u) << "\n";
        }
        std::string path = csv_path(cli, "solve_solution.csv");
        art.add(path, csv.str());
        report.csv_artifacts.push_back(path);
    }
    report.verdict = "solved";
}

void run_stability(const ProblemFile& problem, Report& report, const CliOptions& cli,
                   PendingArtifacts& art) {
    ScalarEquation eq = make_scalar_equation(problem);
    StabilityConfig config;
    config.alphas = effective_alphas(problem);
    if (problem.analysis.bound) config.spectrum_bounds.membership_bound = *problem.analysis.bound;
    if (problem.analysis.eps) config.spectrum_bounds.eps = *problem.analysis.eps;
    if (problem.analysis.tol) config.resolvent.tol = rational_from_double(*problem.analysis.tol);

    StabilityResult result = stability_verdict(eq, config);
    report.conditions = result.conditions;
    report.verdict = to_string(result.verdict);
    if (result.spectrum) {
        report.details["spectrum_route"] = to_string(result.spectrum->route());
        report.details["spectrum_description"] = result.spectrum->description();
    }
    auto mean = eq.mean().to_complex();
    report.details["mean"] = Json{{"re", mean.real()}, {"im", mean.imag()}};

    if (!cli.csv_dir.empty()) {
        double horizon = problem.analysis.horizon.value_or(20.0);
        std::ostringstream csv;
        csv << "t,re,im,abs\n";
        for (double t = 0.0; t <= horizon + 1e-12; t += horizon / 400.0) {
            auto u = propagator(eq, 0.0, t);
            csv << t << "," << u.value.real() << "," << u.value.imag() << "," << std::abs(u.value) << "\n";
        }
        std::string path = csv_path(cli, "stability_propagator.csv");
        art.add(path, csv.str());
        report.csv_artifacts.push_back(path);
    }
}

void run_monodromy(const ProblemFile& problem, Report& report, const CliOptions& cli,
                   PendingArtifacts& art) {
    if (!problem.analysis.tau) throw SchemaError("analysis.tau", "monodromy requires a period tau");
    PeriodicConfig config;
    if (problem.analysis.tol) config.integrator = {*problem.analysis.tol, *problem.analysis.tol * 1e-2};
    if (problem.analysis.power_iterations) config.power_iterations = *problem.analysis.power_iterations;
    if (!problem.analysis.alphas.empty()) config.alphas = problem.analysis.alphas;

    MatrixTrigPoly full = problem.a;
    try {
        MonodromyReport mono =
            periodic_stability_verdict(full, problem.a0_matrix(), *problem.analysis.tau, config);
        report.conditions = mono.conditions;
        report.verdict = to_string(mono.verdict);
        Json p = Json::array();
        for (Eigen::Index r = 0; r < mono.p.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < mono.p.cols(); ++c)
                row.push_back(Json{{"re", mono.p(r, c).real()}, {"im", mono.p(r, c).imag()}});
            p.push_back(row);
        }
        report.details["monodromy"] = p;
        Json eigs = Json::array();
        for (const auto& xi : mono.spectrum.all_eigenvalues)
            eigs.push_back(Json{{"re", xi.real()}, {"im", xi.imag()}});
        report.details["eigenvalues"] = eigs;
        report.details["unit_circle_hits"] = mono.spectrum.hits.size();
        report.details["power_sup"] = mono.powers.sup;

        if (problem.forcing && problem.analysis.bridge_alpha) {
            LinearSystem sys = problem.system();
            EvolutionProcess process(sys, config.integrator);
            double tau_d = apstab::to_double(*problem.analysis.tau);
            MatrixTrigPoly forcing = *problem.forcing;
            auto sampled = SampledFunction::from_function(
                [&](double t) {
                    VectorXcd v(problem.dimension);
                    for (size_t r = 0; r < problem.dimension; ++r)
                        v(r) = forcing.at(r, 0).eval(t).value;
                    return v;
                },
                0.0, tau_d, tau_d / 256.0);
            auto bridge =
                periodic_resolvent_bridge(process, mono.p, problem.analysis.bridge_lambda0.value_or(0.0),
                                          *problem.analysis.bridge_alpha, sampled, *problem.analysis.tau);
            report.conditions.push_back(record_from(
                "resolvent_bridge", "u(0) = R(e^((i lambda0 + alpha) tau), P) x0 and u is tau-periodic",
                bridge.periodicity_defect <= 1e-6 ? CheckStatus::Pass : CheckStatus::Fail,
                {{"periodicity_defect", bridge.periodicity_defect}, {"x0_norm", bridge.x0.norm()}}));
        }

        if (!cli.csv_dir.empty()) {
            std::ostringstream csv;
            csv << "n,norm\n";
            for (size_t n = 0; n < mono.powers.norms.size(); ++n)
                csv << (n + 1) << "," << mono.powers.norms[n] << "\n";
            std::string path = csv_path(cli, "monodromy_powers.csv");
            art.add(path, csv.str());
            report.csv_artifacts.push_back(path);
        }
    } catch (const AperiodicSystemError& e) {
        throw SchemaError("analysis.tau", e.what());
    }
}

void run_probe(const ProblemFile& problem, Report& report, const CliOptions& cli, PendingArtifacts& art) {
    LinearSystem sys = problem.system();
    IntegratorOptions opt;
    if (problem.analysis.tol) opt = {*problem.analysis.tol, *problem.analysis.tol * 1e-2};
    EvolutionProcess process(sys, opt);
    double horizon = problem.analysis.horizon.value_or(50.0);
    double step = problem.analysis.grid_step.value_or(horizon / 100.0);

    std::vector<VectorXcd> initials;
    for (size_t j = 0; j < problem.dimension; ++j) {
        VectorXcd e = VectorXcd::Zero(problem.dimension);
        e(j) = 1.0;
        initials.push_back(e);
    }
    auto probe = stability_probe(process, initials, 0.0, horizon);
    auto scan = sup_norm_scan(process, horizon, step);
    auto axioms = propagator_matrix(sys, 0.0, std::min(horizon, 10.0), opt, 3);

    report.conditions.push_back(record_from("process_axioms",
                                            "U(t,t) = I and U(t,r) U(r,s) = U(t,s) within tolerance",
                                            axioms.cocycle_defect <= 1e-8 ? CheckStatus::Pass
                                                                          : CheckStatus::Fail,
                                            {{"identity_defect", axioms.identity_defect},
                                             {"cocycle_defect", axioms.cocycle_defect}}));
    report.conditions.push_back(record_from(
        "sup_norm_scan", "sup_{0<=s<=t<=H} ||U(t,s)|| finite with no growth trend",
        scan.growth_flag ? CheckStatus::Fail : CheckStatus::Pass,
        {{"sup", scan.sup}, {"argmax_s", scan.argmax_s}, {"argmax_t", scan.argmax_t},
         {"certificate_m", scan.certificate.m}, {"certificate_alpha", scan.certificate.alpha}}));
    report.conditions.push_back(record_from("trajectory_decay", "||U(t,s) x0|| tail behavior over the probe set",
                                            CheckStatus::Info, {},
                                            std::string("suggestion: ") + to_string(probe.suggestion)));
    report.verdict = to_string(probe.suggestion);
    report.details["sup"] = scan.sup;
    report.details["bound_certificate"] =
        Json{{"m", scan.certificate.m}, {"alpha", scan.certificate.alpha}};

    if (!cli.csv_dir.empty()) {
        for (size_t k = 0; k < probe.curves.size(); ++k) {
            std::ostringstream csv;
            csv << "t";
            for (size_t j = 0; j < problem.dimension; ++j) csv << ",re_" << j << ",im_" << j;
            csv << "\n";
            for (const auto& [t, state] : probe.curves[k].state_curve) {
                csv << t;
                for (Eigen::Index j = 0; j < state.size(); ++j)
                    csv << "," << state(j).real() << "," << state(j).imag();
                csv << "\n";
            }
            std::string path = csv_path(cli, "probe_trajectory_" + std::to_string(k) + ".csv");
            art.add(path, csv.str());
            report.csv_artifacts.push_back(path);
        }
        std::ostringstream csv;
        csv << "s,t,norm\n";
        for (const auto& [s, t, norm] : scan.samples) csv << s << "," << t << "," << norm << "\n";
        std::string path = csv_path(cli, "probe_scan.csv");
        art.add(path, csv.str());
        report.csv_artifacts.push_back(path);
    }
}

void run_sweep(const ProblemFile& problem, Report& report, const CliOptions& cli, PendingArtifacts& art) {
    SemiModule lambda = coefficient_semimodule(problem);
    unsigned long lattice_bound = problem.analysis.lattice_bound.value_or(2);

    // symmetric lattice window: the truncation together with its negatives
    std::set<Frequency> window = lambda.truncate(lattice_bound);
    std::vector<Frequency> lattice;
    for (const auto& f : window) lattice.push_back(f);
    for (const auto& f : window)
        if (!f.is_zero() && !window.count(-f)) lattice.push_back(-f);

    MatrixXcd a0 = problem.a0_matrix().value_or(MatrixXcd::Zero(problem.dimension, problem.dimension));
    GeneratorTruncation trunc = galerkin_generator(a0, problem.a, lattice);

    std::vector<std::complex<double>> points = problem.analysis.sweep_points;
    if (points.empty()) {
        for (double re = -2.0; re <= 1.0 + 1e-9; re += 0.5)
            for (double im = -2.0; im <= 2.0 + 1e-9; im += 0.5) points.emplace_back(re, im);
    }
    auto sweep = resolvent_norm_sweep(trunc, points);
    auto lattice_pts = spectrum_lattice(a0, lambda, lattice_bound);

    size_t singular = 0;
    double max_norm = 0;
    for (const auto& p : sweep) {
        if (!std::isfinite(p.resolvent_norm))
            ++singular;
        else
            max_norm = std::max(max_norm, p.resolvent_norm);
    }
    report.details["lattice_size"] = lattice.size();
    report.details["dropped_couplings"] = trunc.dropped_couplings;
    report.details["singular_points"] = singular;
    report.details["max_resolvent_norm"] = max_norm;
    Json lat = Json::array();
    for (const auto& p : lattice_pts) lat.push_back(Json{{"re", p.real()}, {"im", p.imag()}});
    report.details["spectrum_lattice"] = lat;

    report.conditions.push_back(record_from(
        "resolvent_sweep", "||R(z, G_trunc)|| finite off the spectrum lattice", CheckStatus::Info,
        {{"points", double(sweep.size())}, {"singular", double(singular)}, {"max_norm", max_norm}},
        "truncation-dependent; lattice window bound " + std::to_string(lattice_bound)));

    bool all_off_lattice = true;
    for (const auto& p : sweep)
        if (!std::isfinite(p.resolvent_norm)) all_off_lattice = false;
    if (all_off_lattice && !sweep.empty()) {
        auto radius = perturbation_radius(a0, points, lambda, lattice);
        report.details["delta0"] = radius.delta0;
        report.conditions.push_back(record_from(
            "perturbation_radius", "sup_t ||A(t)|| < delta0 keeps sigma(G) off the sampled set",
            CheckStatus::Info, {{"delta0", radius.delta0}, {"max_resolvent_norm", radius.max_resolvent_norm}},
            "Neumann-series estimate on the truncation; not a certified radius"));
    } else {
        report.conditions.push_back(record_from("perturbation_radius",
                                                "sup_t ||A(t)|| < delta0 keeps sigma(G) off the sampled set",
                                                CheckStatus::NotApplicable, {},
                                                "sample points intersect the lattice spectrum"));
    }
    report.verdict = "swept";

    if (!cli.csv_dir.empty()) {
        std::ostringstream csv;
        csv << "re,im,norm\n";
        for (const auto& p : sweep) {
            csv << p.point.real() << "," << p.point.imag() << ",";
            if (std::isfinite(p.resolvent_norm))
                csv << p.resolvent_norm;
            else
                csv << "inf";
            csv << "\n";
        }
        std::string path = csv_path(cli, "sweep_resolvent.csv");
        art.add(path, csv.str());
        report.csv_artifacts.push_back(path);
    }
}

void run_report(const ProblemFile& problem, Report& report, const CliOptions& cli, PendingArtifacts& art) {
    run_semimodule(problem, report, cli, art);
    std::string semimodule_verdict = report.verdict;
    run_spectrum(problem, report, cli, art);
    if (problem.is_scalar()) {
        run_stability(problem, report, cli, art);
    } else {
        run_probe(problem, report, cli, art);
    }
    report.details["semimodule_verdict"] = semimodule_verdict;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strong-stability analysis for linear almost periodic differential equations"};
    app.require_subcommand(1);

    CliOptions cli;
    const std::vector<std::string> commands{"spectrum", "semimodule", "solve",  "stability",
                                            "monodromy", "probe",      "sweep", "report"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("problem", cli.problem_path, "problem JSON file")->required();
        sub->add_option("--out", cli.out_path, "write the JSON report here (default: stdout)");
        sub->add_option("--csv", cli.csv_dir, "directory for CSV artifacts");
        sub->add_option("--tol", cli.tol, "tolerance override");
        sub->add_option("--horizon", cli.horizon, "time horizon override");
        sub->add_option("--bound", cli.bound, "search bound override");
        sub->add_option("--alphas", cli.alphas_csv, "comma-separated alpha sequence (exact decimals)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto started = std::chrono::steady_clock::now();
    try {
        std::string command = app.get_subcommands().front()->get_name();
        ProblemFile problem = parse_problem_text(read_file(cli.problem_path));
        apply_overrides(problem, cli);

        Report report;
        report.command = command;
        report.input_digest = fnv1a_digest(serialize_problem_text(problem));

        PendingArtifacts artifacts;
        if (command == "spectrum")
            run_spectrum(problem, report, cli, artifacts);
        else if (command == "semimodule")
            run_semimodule(problem, report, cli, artifacts);
        else if (command == "solve")
            run_solve(problem, report, cli, artifacts);
        else if (command == "stability")
            run_stability(problem, report, cli, artifacts);
        else if (command == "monodromy")
            run_monodromy(problem, report, cli, artifacts);
        else if (command == "probe")
            run_probe(problem, report, cli, artifacts);
        else if (command == "sweep")
            run_sweep(problem, report, cli, artifacts);
        else if (command == "report")
            run_report(problem, report, cli, artifacts);

        report.timing_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

        artifacts.flush();
        std::string text = report.to_text();
        if (cli.out_path.empty()) {
            std::cout << text;
        } else {
            std::filesystem::path out(cli.out_path);
            if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
            std::ofstream stream(out, std::ios::binary);
            if (!stream) throw std::runtime_error("cannot write " + cli.out_path);
            stream << text;
        }
        return 0;
    } catch (const SchemaError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NotApplicableError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
