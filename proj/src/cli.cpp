#include "railsched/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "railsched/analysis.hpp"
#include "railsched/factory.hpp"
#include "railsched/hybrid.hpp"
#include "railsched/manifest.hpp"

namespace railsched::cli {

namespace {

using nlohmann::json;

// ---- small I/O helpers ("-" means stdin/stdout) ---------------------------

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << content;
}

Edge parse_edge(const std::string& text) {
    auto pos = text.find("->");
    if (pos == std::string::npos || pos == 0 || pos + 2 >= text.size())
        throw ParameterError("edge '" + text + "' is not of the form FROM->TO");
    return {text.substr(0, pos), text.substr(pos + 2)};
}

PenaltyConfig parse_penalties(const std::string& name, double p_sum, double p_pair) {
    if (name == "overlapping") return PenaltyConfig::overlapping();
    if (name == "split") return PenaltyConfig::split();
    if (name == "custom") return {p_sum, p_pair, "custom"};
    throw ParameterError("unknown penalty regime '" + name +
                         "' (overlapping, split, custom)");
}

SamplerBackend parse_backend(const std::string& name) {
    if (name == "enumerate") return SamplerBackend::Enumerate;
    if (name == "anneal") return SamplerBackend::Anneal;
    if (name == "qaoa") return SamplerBackend::Qaoa;
    throw ParameterError("unknown backend '" + name + "' (enumerate, anneal, qaoa)");
}

json manifest_as_json(const RunManifest& manifest) {
    return json::parse(manifest_json(manifest));
}

// Timetable as a JSON array ordered train-major along each route.
json times_to_json(const Instance& instance,
                   const std::map<StationTrain, Minutes>& times) {
    json rows = json::array();
    for (const Train& train : instance.trains)
        for (const StationId& s : train.route) {
            auto it = times.find({s, train.id});
            if (it == times.end()) continue;
            rows.push_back({{"train", train.id}, {"station", s}, {"arrive", it->second}});
        }
    return rows;
}

json report_to_json(const Instance& instance, const SolutionReport& report) {
    json doc;
    doc["feasible_strict"] = report.feasible_strict;
    doc["feasible_relaxed"] = report.feasible_relaxed;
    if (report.objective) doc["objective"] = *report.objective;
    else doc["objective"] = nullptr;
    doc["times"] = times_to_json(instance, report.times);
    json violations = json::array();
    for (const ReportViolation& v : report.violations)
        violations.push_back(
            {{"family", v.family}, {"trains", v.trains}, {"detail", v.detail}});
    doc["violations"] = violations;
    json passing = json::array();
    for (const auto& [key, minutes] : report.passing_times)
        passing.push_back({{"train", key.first},
                           {"from", key.second.first},
                           {"to", key.second.second},
                           {"minutes", minutes}});
    doc["passing_times"] = passing;
    return doc;
}

// ---- shared option bundles -------------------------------------------------

struct SamplerOptions {
    std::string backend = "anneal";
    long shots = 1000;
    int sweeps = 1000;
    double beta_min = 0.1;
    double beta_max = 5.0;
    int threads = 1;
    int layers = 1;
    double noise_lambda = 0.0;
    bool noise_auto = false;
    int max_evals = 50;
    long top = 1000;
    int max_vars = 24;

    void attach(CLI::App* cmd, bool with_backend) {
        if (with_backend)
            cmd->add_option("--backend", backend,
                            "Sampler: enumerate, anneal or qaoa")
                ->capture_default_str();
        cmd->add_option("--shots", shots, "Samples to draw")->capture_default_str();
        cmd->add_option("--sweeps", sweeps, "Anneal length in full Metropolis passes")
            ->capture_default_str();
        cmd->add_option("--beta-min", beta_min, "Initial inverse temperature")
            ->capture_default_str();
        cmd->add_option("--beta-max", beta_max, "Final inverse temperature")
            ->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads for anneal shots")
            ->capture_default_str();
        cmd->add_option("--layers", layers, "Circuit depth p")->capture_default_str();
        cmd->add_option("--noise-lambda", noise_lambda,
                        "Uniform-mixture weight in [0,1]")
            ->capture_default_str();
        cmd->add_flag("--noise-auto", noise_auto,
                      "Calibrate the mixture weight from the two-qubit gate count");
        cmd->add_option("--max-evals", max_evals, "Angle-optimizer evaluation budget")
            ->capture_default_str();
        cmd->add_option("--top", top, "States kept by the enumerate backend")
            ->capture_default_str();
        cmd->add_option("--max-vars", max_vars, "Exhaustive enumeration cap")
            ->capture_default_str();
    }

    AnnealConfig anneal_config(std::uint64_t seed) const {
        AnnealConfig c;
        c.shots = shots;
        c.sweeps = sweeps;
        c.beta_min = beta_min;
        c.beta_max = beta_max;
        c.seed = seed;
        c.threads = threads;
        return c;
    }

    QaoaConfig qaoa_config(std::uint64_t seed, const IsingModel& model) const {
        QaoaConfig c;
        c.layers = layers;
        c.shots = shots;
        c.noise_lambda =
            noise_auto ? calibrated_noise_lambda(model, layers) : noise_lambda;
        c.optimizer.max_evals = max_evals;
        c.seed = seed;
        return c;
    }
};

// ---- subcommand implementations --------------------------------------------

struct GenerateOptions {
    bool worked_example = false;
    int trains = 2;
    Minutes d_max = 2;
    bool disturbed = false;
    std::uint64_t seed = 0;
    std::string out = "-";
};

int run_generate(const GenerateOptions& opt, const std::vector<std::string>& argv) {
    Instance instance;
    if (opt.worked_example) {
        instance = make_worked_example();
    } else {
        FamilySpec spec;
        spec.train_count = opt.trains;
        spec.d_max = opt.d_max;
        spec.disturbed = opt.disturbed;
        spec.seed = opt.seed;
        instance = make_family_instance(spec);
    }
    std::vector<Violation> findings = validate_instance(instance);
    if (!findings.empty())
        throw ConfigError("generated instance failed validation: " + findings[0].code);

    RunManifest manifest = make_manifest(argv, opt.seed);
    json doc = json::parse(instance_to_json(instance));
    doc["manifest"] = manifest_as_json(manifest);
    write_output(opt.out, doc.dump(2) + "\n");
    return 0;
}

struct QuboOptions {
    std::string in = "-";
    std::string out = "-";
    std::string catalog_out;
    std::string ising_out;
    std::string penalties = "overlapping";
    double p_sum = 4.0;
    double p_pair = 2.0;
};

int run_qubo(const QuboOptions& opt, const std::vector<std::string>& argv) {
    const std::string text = read_input(opt.in);
    Instance instance = instance_from_json(text);
    TimeWindows windows = compute_time_windows(instance);
    Qubo qubo = assemble(instance, windows,
                         parse_penalties(opt.penalties, opt.p_sum, opt.p_pair));

    RunManifest manifest = make_manifest(argv, 0);
    manifest_add_input(manifest, opt.in, text);
    const std::string block = manifest_comment_block(manifest);

    write_output(opt.out, block + write_qubo(qubo));

    std::string catalog_path = opt.catalog_out;
    if (catalog_path.empty() && opt.out != "-") catalog_path = opt.out + ".catalog";
    if (!catalog_path.empty())
        write_output(catalog_path, block + write_catalog(qubo.catalog));
    if (!opt.ising_out.empty())
        write_output(opt.ising_out, block + write_ising(to_ising(qubo)));
    return 0;
}

struct IlpOptions {
    std::string in = "-";
    std::string out = "-";
    std::string diagram_out;
    std::vector<std::string> disturbances;   // FROM->TO=W
};

int run_ilp_solve(const IlpOptions& opt, const std::vector<std::string>& argv) {
    const std::string text = read_input(opt.in);
    Instance instance = instance_from_json(text);
    TimeWindows windows = compute_time_windows(instance);

    std::map<Edge, Minutes> realization;
    for (const std::string& spec : opt.disturbances) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ParameterError("disturbance '" + spec + "' is not FROM->TO=MINUTES");
        realization[parse_edge(spec.substr(0, eq))] = std::stoi(spec.substr(eq + 1));
    }

    IlpSolution solution = solve_exact(build_ilp(instance, windows, realization));

    RunManifest manifest = make_manifest(argv, 0);
    manifest_add_input(manifest, opt.in, text);

    json doc;
    doc["status"] = solution.status == SolveStatus::Optimal ? "optimal" : "infeasible";
    doc["nodes"] = solution.nodes;
    if (solution.status == SolveStatus::Optimal) {
        SolutionReport report = report_from_times(instance, solution.times);
        doc.update(report_to_json(instance, report));
        if (!opt.diagram_out.empty())
            write_output(opt.diagram_out, export_train_diagram(report, instance));
    }
    doc["manifest"] = manifest_as_json(manifest);
    write_output(opt.out, doc.dump(2) + "\n");
    return solution.status == SolveStatus::Optimal ? 0 : 1;
}

struct SolveOptions {
    std::string in = "-";
    std::string out = "-";
    std::uint64_t seed = 0;
    SamplerOptions sampler;
};

int run_solve(const SolveOptions& opt, const std::vector<std::string>& argv) {
    const std::string text = read_input(opt.in);
    Qubo qubo = read_qubo(text);
    IsingModel ising = to_ising(qubo);

    SampleSet samples;
    switch (parse_backend(opt.sampler.backend)) {
    case SamplerBackend::Enumerate:
        samples = enumerate_samples(qubo, opt.sampler.top, opt.sampler.max_vars);
        break;
    case SamplerBackend::Anneal:
        samples = simulated_anneal(ising, opt.sampler.anneal_config(opt.seed));
        break;
    case SamplerBackend::Qaoa:
        samples = qaoa_optimize_and_sample(ising, opt.sampler.qaoa_config(opt.seed, ising));
        break;
    }

    RunManifest manifest = make_manifest(argv, opt.seed);
    manifest_add_input(manifest, opt.in, text);
    write_output(opt.out, manifest_comment_block(manifest) + write_samples(samples));
    return 0;
}

struct SpectrumOptions {
    std::string in = "-";
    std::string out = "-";
    std::string histogram_out;
    std::string penalties = "overlapping";
    double p_sum = 4.0;
    double p_pair = 2.0;
    double bin_width = 0.5;
    int max_vars = 24;
};

int run_spectrum(const SpectrumOptions& opt, const std::vector<std::string>& argv) {
    const std::string text = read_input(opt.in);
    Instance instance = instance_from_json(text);
    TimeWindows windows = compute_time_windows(instance);
    Qubo qubo = assemble(instance, windows,
                         parse_penalties(opt.penalties, opt.p_sum, opt.p_pair));
    std::vector<SpectrumEntry> spectrum = enumerate_spectrum(qubo, opt.max_vars);
    SpectrumSummary summary = spectrum_summary(spectrum, qubo, opt.bin_width);

    RunManifest manifest = make_manifest(argv, 0);
    manifest_add_input(manifest, opt.in, text);

    json doc;
    doc["nvars"] = qubo.n;
    doc["states"] = static_cast<long>(spectrum.size());
    doc["feasible_count"] = summary.feasible_count;
    doc["infeasible_count"] = summary.infeasible_count;
    auto opt_double = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    doc["min_feasible"] = opt_double(summary.min_feasible);
    doc["max_feasible"] = opt_double(summary.max_feasible);
    doc["min_infeasible"] = opt_double(summary.min_infeasible);
    doc["max_infeasible"] = opt_double(summary.max_infeasible);
    doc["gap"] = opt_double(summary.gap);
    doc["regime"] = summary.regime;
    json objectives = json::array();
    for (const auto& [value, count] : summary.feasible_objectives)
        objectives.push_back({{"value", value}, {"count", count}});
    doc["feasible_objectives"] = objectives;
    doc["penalties"] = {{"p_sum", qubo.penalties.p_sum},
                        {"p_pair", qubo.penalties.p_pair},
                        {"regime", qubo.penalties.regime}};
    doc["manifest"] = manifest_as_json(manifest);
    write_output(opt.out, doc.dump(2) + "\n");

    if (!opt.histogram_out.empty())
        write_output(opt.histogram_out, manifest_comment_block(manifest) +
                                            write_histogram_csv(summary.energy_histogram));
    return 0;
}

struct AnalyzeOptions {
    std::string in;
    std::string samples;
    std::string out = "-";
    std::string histogram_out;
    std::string diagram_out;
    std::string ref_hist;
    std::string edge = "MR->CS";
    bool relaxed = false;
};

int run_analyze(const AnalyzeOptions& opt, const std::vector<std::string>& argv) {
    const std::string instance_text = read_input(opt.in);
    Instance instance = instance_from_json(instance_text);
    TimeWindows windows = compute_time_windows(instance);
    Qubo qubo = assemble(instance, windows, PenaltyConfig::overlapping());

    const std::string samples_text = read_input(opt.samples);
    SampleSet samples = read_samples(samples_text);

    std::vector<SolutionReport> reports;
    std::vector<long> weights;
    std::ptrdiff_t best_feasible = -1;
    for (const SampleRecord& rec : samples.records) {
        reports.push_back(decode(qubo, rec.bits));
        weights.push_back(rec.count);
        if (best_feasible < 0 && reports.back().feasible_strict)
            best_feasible = static_cast<std::ptrdiff_t>(reports.size()) - 1;
    }   // records are energy-sorted, so the first strict hit is the best

    RunManifest manifest = make_manifest(argv, samples.seed);
    manifest_add_input(manifest, opt.in, instance_text);
    manifest_add_input(manifest, opt.samples, samples_text);

    json doc;
    doc["nvars"] = qubo.n;
    doc["shots"] = samples.shots;
    doc["records"] = static_cast<long>(samples.records.size());
    doc["backend"] = samples.backend;
    doc["best_energy"] =
        samples.records.empty() ? json(nullptr) : json(samples.records.front().energy);
    doc["feasible_fraction_strict"] = feasible_fraction(samples, qubo, false);
    doc["feasible_fraction_relaxed"] = feasible_fraction(samples, qubo, true);
    doc["best_feasible_objective"] = best_feasible >= 0
        ? json(*reports[best_feasible].objective)
        : json(nullptr);

    Histogram hist = passing_histogram(reports, parse_edge(opt.edge), opt.relaxed,
                                       &weights);
    doc["histogram_edge"] = opt.edge;
    doc["histogram_total"] = hist.total();
    if (hist.empty_warning)
        doc["histogram_warning"] = "no feasible sample crosses this edge";
    if (!opt.histogram_out.empty())
        write_output(opt.histogram_out,
                     manifest_comment_block(manifest) + write_histogram_csv(hist));

    if (!opt.ref_hist.empty()) {
        Histogram reference = read_histogram_csv(read_input(opt.ref_hist));
        doc["tv_distance"] = total_variation(hist, reference);
    }

    if (!opt.diagram_out.empty()) {
        if (best_feasible < 0)
            throw ConfigError("no strictly feasible sample to draw a diagram from");
        write_output(opt.diagram_out,
                     export_train_diagram(reports[best_feasible], instance));
    }

    doc["manifest"] = manifest_as_json(manifest);
    write_output(opt.out, doc.dump(2) + "\n");
    return 0;
}

struct HybridOptions {
    std::string in = "-";
    std::string out = "-";
    std::string zone = "CS,MR";
    std::string backend = "enumerate";
    int iterations = 4;
    int representatives = 4;
    std::uint64_t seed = 0;
    std::string penalties = "overlapping";
    double p_sum = 4.0;
    double p_pair = 2.0;
    SamplerOptions sampler;
};

int run_hybrid_cmd(const HybridOptions& opt, const std::vector<std::string>& argv) {
    const std::string text = read_input(opt.in);
    Instance instance = instance_from_json(text);

    HybridConfig config;
    std::stringstream zones(opt.zone);
    std::string station;
    while (std::getline(zones, station, ','))
        if (!station.empty()) config.zone.insert(station);
    config.backend = parse_backend(opt.backend);
    config.iterations = opt.iterations;
    config.k_representatives = opt.representatives;
    config.seed = opt.seed;
    config.penalties = parse_penalties(opt.penalties, opt.p_sum, opt.p_pair);
    config.anneal = opt.sampler.anneal_config(opt.seed);
    config.enumerate_top = opt.sampler.top;
    config.qaoa.layers = opt.sampler.layers;
    config.qaoa.shots = opt.sampler.shots;
    config.qaoa.noise_lambda = opt.sampler.noise_lambda;
    config.qaoa.optimizer.max_evals = opt.sampler.max_evals;
    config.qaoa.seed = opt.seed;

    HybridResult result = run_hybrid(instance, config);

    RunManifest manifest = make_manifest(argv, opt.seed);
    manifest_add_input(manifest, opt.in, text);

    json doc;
    doc["iterations_run"] = result.iterations_run;
    doc["converged"] = result.converged;
    doc["diagnostic"] = result.diagnostic;
    doc["best_objective"] = result.best() ? json(result.best()->joint_objective)
                                          : json(nullptr);
    json portfolio = json::array();
    for (const PortfolioEntry& entry : result.portfolio)
        portfolio.push_back({{"iteration", entry.iteration},
                             {"stochastic_objective", entry.stochastic_objective},
                             {"joint_objective", entry.joint_objective},
                             {"stochastic_times",
                              times_to_json(instance, entry.stochastic_times)},
                             {"joint_times", times_to_json(instance, entry.joint_times)}});
    doc["portfolio"] = portfolio;
    doc["manifest"] = manifest_as_json(manifest);
    write_output(opt.out, doc.dump(2) + "\n");
    return 0;
}

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string instance_path;
    std::string out = "-";
    std::string json_out;
    std::string embed_anchors;
    double embed_predict = 0.0;
};

int run_report(const ReportOptions& opt, const std::vector<std::string>& argv) {
    RunManifest manifest = make_manifest(argv, 0);

    std::optional<Instance> instance;
    std::optional<Qubo> qubo;
    if (!opt.instance_path.empty()) {
        const std::string text = read_input(opt.instance_path);
        manifest_add_input(manifest, opt.instance_path, text);
        instance = instance_from_json(text);
        qubo = assemble(*instance, compute_time_windows(*instance),
                        PenaltyConfig::overlapping());
    }

    std::ostringstream text_out;
    json summary;
    summary["inputs"] = json::array();
    std::vector<std::pair<double, double>> scaling_points;   // (nvars, fraction)

    for (const std::string& path : opt.inputs) {
        const std::string content = read_input(path);
        manifest_add_input(manifest, path, content);
        json entry;
        entry["path"] = path;

        std::string body = content;
        // skip leading comment lines when sniffing the format
        std::istringstream sniff(content);
        std::string first_line;
        while (std::getline(sniff, first_line))
            if (!first_line.empty() && first_line[0] != '#') break;

        if (!first_line.empty() && first_line[0] == '{') {
            json doc = json::parse(content);
            entry["kind"] = "summary";
            text_out << path << ":\n";
            if (doc.contains("regime")) {
                text_out << "  spectral regime " << doc["regime"].get<std::string>();
                if (!doc["gap"].is_null())
                    text_out << ", gap " << format_coeff(doc["gap"].get<double>());
                text_out << "\n";
                if (doc.contains("feasible_objectives")) {
                    text_out << "  feasible objective values:";
                    for (const auto& item : doc["feasible_objectives"])
                        text_out << ' ' << format_coeff(item["value"].get<double>())
                                 << "(x" << item["count"].get<long>() << ")";
                    text_out << "\n";
                }
            }
            if (doc.contains("feasible_fraction_strict")) {
                double fraction = doc["feasible_fraction_strict"].get<double>();
                text_out << "  feasible fraction "
                         << format_coeff(fraction) << " over "
                         << doc["shots"].get<long>() << " shots\n";
                if (doc.contains("nvars"))
                    scaling_points.push_back({doc["nvars"].get<double>(), fraction});
            }
            if (doc.contains("best_objective") && !doc["best_objective"].is_null())
                text_out << "  best objective "
                         << format_coeff(doc["best_objective"].get<double>()) << "\n";
            summary["inputs"].push_back(entry);
            continue;
        }

        // sample CSV
        SampleSet samples = read_samples(content);
        entry["kind"] = "samples";
        entry["shots"] = samples.shots;
        text_out << path << ":\n";
        if (samples.records.empty()) {
            text_out << "  no samples\n";
            entry["note"] = "no samples";
        } else {
            text_out << "  " << samples.shots << " shots, best energy "
                     << format_coeff(samples.records.front().energy) << "\n";
            entry["best_energy"] = samples.records.front().energy;
            if (qubo && static_cast<int>(samples.records.front().bits.size()) == qubo->n) {
                double fraction = feasible_fraction(samples, *qubo, false);
                entry["feasible_fraction_strict"] = fraction;
                text_out << "  feasible fraction " << format_coeff(fraction) << "\n";
                scaling_points.push_back({static_cast<double>(qubo->n), fraction});
            }
        }
        summary["inputs"].push_back(entry);
    }

    if (scaling_points.size() >= 3) {
        bool positive = std::all_of(scaling_points.begin(), scaling_points.end(),
                                    [](const auto& p) { return p.second > 0; });
        if (positive) {
            ScalingFit fit = fit_scaling(scaling_points, ScalingModel::Exponential);
            text_out << "feasible-fraction scaling: log-linear slope "
                     << format_coeff(fit.slope) << ", r2 " << format_coeff(fit.r2)
                     << "\n";
            summary["feasible_fraction_fit"] = {
                {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
        }
    }

    if (!opt.embed_anchors.empty()) {
        std::vector<std::pair<double, double>> anchors;
        std::stringstream list(opt.embed_anchors);
        std::string item;
        while (std::getline(list, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ParameterError("anchor '" + item + "' is not LOGICAL:PHYSICAL");
            anchors.push_back(
                {std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        }
        ScalingFit fit = fit_scaling(anchors, ScalingModel::Linear);
        text_out << "embedding fit: physical = " << format_coeff(fit.slope)
                 << " * logical + " << format_coeff(fit.intercept) << " (r2 "
                 << format_coeff(fit.r2) << ")\n";
        summary["embedding_fit"] = {
            {"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
        if (opt.embed_predict > 0) {
            double prediction = fit.predict(opt.embed_predict);
            text_out << "embedding prediction at " << format_coeff(opt.embed_predict)
                     << " logical: " << format_coeff(prediction) << " physical\n";
            summary["embedding_fit"]["prediction_at"] = opt.embed_predict;
            summary["embedding_fit"]["prediction"] = prediction;
        }
    }

    if (opt.inputs.empty() && opt.embed_anchors.empty()) text_out << "no inputs\n";
    write_output(opt.out, manifest_comment_block(manifest) + text_out.str());
    if (!opt.json_out.empty()) {
        summary["manifest"] = manifest_as_json(manifest);
        write_output(opt.json_out, summary.dump(2) + "\n");
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Delay-aware railway rescheduling via exact, annealing and "
                 "circuit-sampling solvers"};
    app.require_subcommand(1);

    std::vector<std::string> argv = {"railsched"};
    argv.insert(argv.end(), args.begin(), args.end());

    int exit_code = 0;

    GenerateOptions gen;
    CLI::App* generate = app.add_subcommand("generate", "Emit an instance document");
    generate->add_flag("--example", gen.worked_example, "The two-train worked instance");
    generate->add_option("--trains", gen.trains, "Family size")->capture_default_str();
    generate->add_option("--dmax", gen.d_max, "Allowed extra delay per arrival")
        ->capture_default_str();
    generate->add_flag("--disturbed", gen.disturbed, "Inject conflicting delays");
    generate->add_option("--seed", gen.seed, "Selects the delayed trains")
        ->envname("RAILSCHED_SEED");
    generate->add_option("--out", gen.out, "Output path or -")->capture_default_str();
    generate->callback([&] { exit_code = run_generate(gen, argv); });

    QuboOptions qb;
    CLI::App* qubo = app.add_subcommand("qubo", "Compile an instance to a QUBO file");
    qubo->add_option("--in", qb.in, "Instance document or -")->capture_default_str();
    qubo->add_option("--out", qb.out, "QUBO path or -")->capture_default_str();
    qubo->add_option("--catalog-out", qb.catalog_out,
                     "Variable catalog path (defaults to OUT.catalog)");
    qubo->add_option("--ising-out", qb.ising_out, "Also write the spin form");
    qubo->add_option("--penalties", qb.penalties, "overlapping, split or custom")
        ->capture_default_str();
    qubo->add_option("--psum", qb.p_sum, "Custom choose-one penalty")
        ->capture_default_str();
    qubo->add_option("--ppair", qb.p_pair, "Custom pairwise penalty")
        ->capture_default_str();
    qubo->callback([&] { exit_code = run_qubo(qb, argv); });

    IlpOptions ilp;
    CLI::App* ilp_solve =
        app.add_subcommand("ilp-solve", "Solve an instance exactly");
    ilp_solve->add_option("--in", ilp.in, "Instance document or -")
        ->capture_default_str();
    ilp_solve->add_option("--out", ilp.out, "Solution report path or -")
        ->capture_default_str();
    ilp_solve->add_option("--diagram-out", ilp.diagram_out, "Timetable table path");
    ilp_solve->add_option("--w", ilp.disturbances,
                          "Extra travel time, FROM->TO=MINUTES (repeatable)");
    ilp_solve->callback([&] { exit_code = run_ilp_solve(ilp, argv); });

    SolveOptions solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Sample a QUBO file");
    solve_cmd->add_option("--in", solve.in, "QUBO file or -")->capture_default_str();
    solve_cmd->add_option("--out", solve.out, "Sample CSV path or -")
        ->capture_default_str();
    solve_cmd->add_option("--seed", solve.seed, "Sampler seed")
        ->envname("RAILSCHED_SEED");
    solve.sampler.attach(solve_cmd, true);
    solve_cmd->callback([&] { exit_code = run_solve(solve, argv); });

    SpectrumOptions spectrum;
    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "Enumerate and classify all states");
    spectrum_cmd->add_option("--in", spectrum.in, "Instance document or -")
        ->capture_default_str();
    spectrum_cmd->add_option("--out", spectrum.out, "Summary path or -")
        ->capture_default_str();
    spectrum_cmd->add_option("--histogram-out", spectrum.histogram_out,
                             "Energy histogram CSV path");
    spectrum_cmd->add_option("--penalties", spectrum.penalties,
                             "overlapping, split or custom")
        ->capture_default_str();
    spectrum_cmd->add_option("--psum", spectrum.p_sum, "Custom choose-one penalty")
        ->capture_default_str();
    spectrum_cmd->add_option("--ppair", spectrum.p_pair, "Custom pairwise penalty")
        ->capture_default_str();
    spectrum_cmd->add_option("--bin-width", spectrum.bin_width, "Histogram bin width")
        ->capture_default_str();
    spectrum_cmd->add_option("--max-vars", spectrum.max_vars, "Enumeration cap")
        ->capture_default_str();
    spectrum_cmd->callback([&] { exit_code = run_spectrum(spectrum, argv); });

    AnalyzeOptions analyze;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Decode a sample file against its instance");
    analyze_cmd->add_option("--in", analyze.in, "Instance document")->required();
    analyze_cmd->add_option("--samples", analyze.samples, "Sample CSV")->required();
    analyze_cmd->add_option("--out", analyze.out, "Summary path or -")
        ->capture_default_str();
    analyze_cmd->add_option("--edge", analyze.edge, "Edge for the passing histogram")
        ->capture_default_str();
    analyze_cmd->add_flag("--relaxed", analyze.relaxed,
                          "Filter on relaxed feasibility (passing not checked)");
    analyze_cmd->add_option("--histogram-out", analyze.histogram_out,
                            "Passing-time histogram CSV path");
    analyze_cmd->add_option("--diagram-out", analyze.diagram_out,
                            "Timetable of the best feasible sample");
    analyze_cmd->add_option("--ref-hist", analyze.ref_hist,
                            "Histogram CSV to compare against (total variation)");
    analyze_cmd->callback([&] { exit_code = run_analyze(analyze, argv); });

    HybridOptions hybrid;
    CLI::App* hybrid_cmd = app.add_subcommand(
        "hybrid", "Sample a station zone, complete the rest exactly");
    hybrid_cmd->add_option("--in", hybrid.in, "Instance document or -")
        ->capture_default_str();
    hybrid_cmd->add_option("--out", hybrid.out, "Portfolio path or -")
        ->capture_default_str();
    hybrid_cmd->add_option("--zone", hybrid.zone, "Comma-separated station zone")
        ->capture_default_str();
    hybrid_cmd->add_option("--backend", hybrid.backend,
                           "enumerate, anneal or qaoa")
        ->capture_default_str();
    hybrid_cmd->add_option("--iterations", hybrid.iterations, "Outer-loop budget")
        ->capture_default_str();
    hybrid_cmd->add_option("--representatives", hybrid.representatives,
                           "Sub-solutions carried into the exact stage")
        ->capture_default_str();
    hybrid_cmd->add_option("--seed", hybrid.seed, "Sampler seed")
        ->envname("RAILSCHED_SEED");
    hybrid_cmd->add_option("--penalties", hybrid.penalties,
                           "overlapping, split or custom")
        ->capture_default_str();
    hybrid_cmd->add_option("--psum", hybrid.p_sum, "Custom choose-one penalty")
        ->capture_default_str();
    hybrid_cmd->add_option("--ppair", hybrid.p_pair, "Custom pairwise penalty")
        ->capture_default_str();
    hybrid.sampler.backend.clear();
    hybrid_cmd->add_option("--shots", hybrid.sampler.shots, "Samples per iteration")
        ->capture_default_str();
    hybrid_cmd->add_option("--sweeps", hybrid.sampler.sweeps, "Anneal length")
        ->capture_default_str();
    hybrid_cmd->add_option("--beta-min", hybrid.sampler.beta_min,
                           "Initial inverse temperature")
        ->capture_default_str();
    hybrid_cmd->add_option("--beta-max", hybrid.sampler.beta_max,
                           "Final inverse temperature")
        ->capture_default_str();
    hybrid_cmd->add_option("--layers", hybrid.sampler.layers, "Circuit depth p")
        ->capture_default_str();
    hybrid_cmd->add_option("--noise-lambda", hybrid.sampler.noise_lambda,
                           "Uniform-mixture weight")
        ->capture_default_str();
    hybrid_cmd->add_option("--max-evals", hybrid.sampler.max_evals,
                           "Angle-optimizer budget")
        ->capture_default_str();
    hybrid_cmd->add_option("--top", hybrid.sampler.top,
                           "States kept by the enumerate backend")
        ->capture_default_str();
    hybrid_cmd->callback([&] { exit_code = run_hybrid_cmd(hybrid, argv); });

    ReportOptions report;
    CLI::App* report_cmd =
        app.add_subcommand("report", "Aggregate sample and summary files");
    report_cmd->add_option("inputs", report.inputs, "Sample CSVs or summary JSONs");
    report_cmd->add_option("--instance", report.instance_path,
                           "Instance for decoding sample files");
    report_cmd->add_option("--out", report.out, "Text summary path or -")
        ->capture_default_str();
    report_cmd->add_option("--json-out", report.json_out, "Machine-readable sidecar");
    report_cmd->add_option("--embed-anchors", report.embed_anchors,
                           "LOGICAL:PHYSICAL pairs, comma separated");
    report_cmd->add_option("--embed-predict", report.embed_predict,
                           "Logical size to extrapolate the embedding fit to");
    report_cmd->callback([&] { exit_code = run_report(report, argv); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

} // namespace railsched::cli
