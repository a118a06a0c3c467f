#include "iqp/cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "iqp/attacks.hpp"
#include "iqp/experiments.hpp"
#include "iqp/io.hpp"
#include "iqp/qrc.hpp"
#include "iqp/scheme.hpp"
#include "iqp/sim.hpp"
#include "iqp/stats.hpp"

namespace iqp::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 1;
    std::string out;
    std::string redundancy_mode = "randomized";
    bool challenge = false;
    bool meta = false;
    bool full = false;
    std::size_t trials = 0;

    // generate
    std::size_t n = 0, m = 0, g = 0, q = 0;

    // attack
    std::string attack;
    std::string matrix_path;
    std::string meta_path;
    bool import_bremner = false;
    std::optional<std::size_t> ambition, endurance, gth, k, radical_seed_count;
    std::optional<double> p;

    // verify / simulate
    std::string samples_path;
    std::string secret_path;
    double g_verify = 0;
    double alpha = 0.05;
    std::size_t sample_count = 1000;

    // experiments
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> k_values{2, 3, 4};
    std::vector<std::string> attacks{"radical", "lazy"};
    std::size_t probes = 20;
};

RedundancyMode redundancy_mode(const Options& o) {
    const auto mode = parse_redundancy_mode(o.redundancy_mode);
    if (!mode) throw UsageError("unknown redundancy mode '" + o.redundancy_mode + "'");
    return *mode;
}

void write_generated(const IqpInstance& inst, const Options& o, std::ostream& out) {
    if (o.out.empty()) throw UsageError("--out is required");
    std::vector<std::string> comments;
    if (!o.challenge) comments.push_back("family " + to_string(inst.family) + " seed " + std::to_string(o.seed));
    write_file_atomic(o.out + ".matrix", emit_matrix(inst.h, comments));
    if (!o.challenge) {
        write_file_atomic(o.out + ".secret", emit_secret(*inst.secret));
        write_file_atomic(o.out + ".json", instance_metadata(inst, o.meta).dump(2) + "\n");
    }
    const auto& p = inst.params;
    out << "wrote " << o.out << ".matrix (" << p.m << "x" << p.n << ", m1=" << p.m1 << ", d=" << p.d
        << ", w=" << p.w() << ")\n";
}

int cmd_generate_stabilizer(const Options& o, std::ostream& out) {
    Rng rng(o.seed);
    const IqpInstance inst = assemble_instance(o.n, o.m, o.g, rng, redundancy_mode(o));
    write_generated(inst, o, out);
    return found_or_accept;
}

int cmd_generate_qrc(const Options& o, std::ostream& out) {
    Rng rng(o.seed);
    const IqpInstance inst = build_qrc_instance({o.q, o.n}, rng);
    write_generated(inst, o, out);
    return found_or_accept;
}

BitMatrix load_matrix(const Options& o) {
    const std::string text = read_file(o.matrix_path);
    return o.import_bremner ? parse_bremner_matrix(text) : parse_matrix(text);
}

InstanceParams params_from_meta(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    const auto& p = j.at("params");
    return {p.at("n").get<std::size_t>(),  p.at("m").get<std::size_t>(),  p.at("g").get<std::size_t>(),
            p.at("m1").get<std::size_t>(), p.at("m2").get<std::size_t>(), p.at("d").get<std::size_t>()};
}

int cmd_attack(const Options& o, std::ostream& out, std::ostream& err) {
    const BitMatrix h = load_matrix(o);
    AttackConfig cfg;
    cfg.seed = o.seed;
    const bool razor = o.attack == "razor";
    cfg.ambition = o.ambition.value_or(8);
    cfg.endurance = o.endurance.value_or(razor ? 100 : 1000);
    cfg.g_th = o.gth.value_or(razor ? unlimited : 1);
    cfg.k = o.k.value_or(6);
    cfg.p = o.p.value_or(0.25);
    if (cfg.endurance == 0 || cfg.k == 0 || cfg.g_th == 0 || !(cfg.p > 0 && cfg.p < 1))
        throw UsageError("need endurance >= 1, k >= 1, gth >= 1 and 0 < p < 1");

    if (razor && !o.meta_path.empty()) {
        const InstanceParams params = params_from_meta(o.meta_path);
        if (!o.gth) cfg.g_th = params.g;
        try {
            const ProbabilityInterval iv = suggest_p(params);
            if (!iv.contains(cfg.p))
                err << "warning: p = " << cfg.p << " lies outside the suggested interval (" << iv.lo << ", " << iv.hi
                    << ")\n";
        } catch (const EmptyInterval& e) {
            err << "warning: " << e.what() << "\n";
        }
    }

    AttackReport report;
    if (o.attack == "double-meyer" && o.radical_seed_count) {
        Rng seed_rng(derive_seed(o.seed, 0));
        const auto seeds = radical_seeds(h, *o.radical_seed_count, seed_rng);
        report = double_meyer(h, cfg, seeds);
    } else {
        report = run_named_attack(o.attack, h, cfg);
    }

    out << to_json(report).dump(2) << "\n";
    if (!o.out.empty()) {
        write_file_atomic(o.out + ".json", to_json(report, false).dump(2) + "\n");
        if (report.found) write_file_atomic(o.out + ".secret", emit_secret(*report.secret));
    }
    return report.found ? found_or_accept : failed_or_reject;
}

int cmd_singletons(const Options& o, std::ostream& out) {
    const BitMatrix h = load_matrix(o);
    const SingletonResult r = singleton_razor(h);
    nlohmann::json j = {{"count", r.singletons.size()}, {"singletons", r.singletons}, {"remaining_rows", r.kept_rows.size()}};
    out << j.dump(2) << "\n";
    if (!o.out.empty()) write_file_atomic(o.out + ".matrix", emit_matrix(r.trimmed));
    return found_or_accept;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const auto samples = parse_samples(read_file(o.samples_path));
    if (samples.empty()) throw ParseError(0, "samples file is empty");
    const BitVector s = parse_secret(read_file(o.secret_path));
    if (samples.front().size() != s.size())
        throw UsageError("sample length " + std::to_string(samples.front().size()) + " differs from secret length " +
                         std::to_string(s.size()));
    std::size_t orthogonal = 0;
    for (const auto& x : samples)
        if (!x.dot(s)) ++orthogonal;
    const double expected = bias(o.g_verify);
    const CountInterval region = umpu_binomial_region(samples.size(), expected, o.alpha);
    const bool accept = region.contains(orthogonal);
    nlohmann::json j = {{"samples", samples.size()},
                        {"orthogonal", orthogonal},
                        {"fraction", static_cast<double>(orthogonal) / static_cast<double>(samples.size())},
                        {"expected_bias", expected},
                        {"accept_region", {region.lo, region.hi}},
                        {"verdict", accept ? "accept" : "reject"}};
    out << j.dump(2) << "\n";
    return accept ? found_or_accept : failed_or_reject;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const BitMatrix h = load_matrix(o);
    const IqpDistribution dist = simulate(h);
    Rng rng(o.seed);
    const auto samples = sample(dist, o.sample_count, rng);
    const std::string text = emit_samples(samples);
    if (o.out.empty())
        out << text;
    else
        write_file_atomic(o.out, text);
    return found_or_accept;
}

std::vector<std::size_t> default_qrc_grid(std::size_t q, std::size_t points) {
    const std::size_t r = (q + 1) / 2;
    std::vector<std::size_t> grid;
    for (std::size_t i = 0; i < points; ++i) grid.push_back(r + (q * i + (points - 1) / 2) / (points - 1));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

int cmd_experiment_sigmoid(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw UsageError("--out is required");
    const std::size_t trials = o.full ? 100000 : (o.trials ? o.trials : 1000);
    const auto records = run_sigmoid_experiment(o.n, o.m, o.g, trials, o.seed, redundancy_mode(o));
    const auto bins = summarize_by_w(records, o.n, o.m, o.g);
    write_file_atomic(o.out + ".csv", records_csv(records));
    write_file_atomic(o.out + ".jsonl", records_jsonl(records));
    write_file_atomic(o.out + ".bins.csv", bins_csv(bins));
    const auto ok = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.success; });
    out << "radical attack recovered " << ok << "/" << records.size() << " secrets\n";
    return found_or_accept;
}

int cmd_experiment_qrc_sweep(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw UsageError("--out is required");
    check_qrc_prime(o.q);
    const auto grid = o.n_grid.empty() ? default_qrc_grid(o.q, 8) : o.n_grid;
    const std::size_t per_point = o.full ? 100 : (o.trials ? o.trials : 20);
    AttackConfig cfg;
    cfg.ambition = o.ambition.value_or(8);
    cfg.endurance = o.endurance.value_or(1000);
    cfg.g_th = o.gth.value_or(1);
    cfg.k = o.k.value_or(6);
    cfg.p = o.p.value_or(0.25);
    const auto records = run_qrc_sweep(o.q, grid, o.attacks, per_point, o.seed, cfg);
    write_file_atomic(o.out + ".csv", records_csv(records));
    write_file_atomic(o.out + ".jsonl", records_jsonl(records));
    write_file_atomic(o.out + ".points.csv", sweep_csv(summarize_sweep(records)));
    out << "wrote " << records.size() << " records for " << grid.size() << " values of n\n";
    return found_or_accept;
}

int cmd_experiment_kernel_stats(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw UsageError("--out is required");
    check_qrc_prime(o.q);
    const auto grid = o.n_grid.empty() ? default_qrc_grid(o.q, 8) : o.n_grid;
    std::vector<std::size_t> ks{1};
    for (auto k : o.k_values)
        if (k > 1) ks.push_back(k);
    const std::size_t instances = o.full ? 100 : (o.trials ? o.trials : 5);
    const auto records = run_kernel_stats(o.q, grid, ks, instances, o.probes, o.seed);
    write_file_atomic(o.out + ".csv", kernel_records_csv(records));
    write_file_atomic(o.out + ".summary.csv", kernel_summary_csv(summarize_kernel_stats(records, o.q)));
    out << "wrote " << records.size() << " kernel records\n";
    return found_or_accept;
}

void add_attack_flags(CLI::App* app, Options& o) {
    app->add_option("--ambition", o.ambition, "Enumerate kernels of dimension below A");
    app->add_option("--endurance", o.endurance, "Maximum number of rounds");
    app->add_option("--gth", o.gth, "Significance threshold on rank(gram(H_x))");
    app->add_option("--k", o.k, "Gram matrices stacked per Double Meyer round");
    app->add_option("--p", o.p, "Row deletion probability of Hamming's razor");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Workbench for generating and attacking obfuscated IQP circuits"};
    app.name(args.empty() ? "iqp_workbench" : args.front());
    app.require_subcommand(1);
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();

    auto* gen = app.add_subcommand("generate", "Generate an instance");
    gen->require_subcommand(1);
    auto* gen_stab = gen->add_subcommand("stabilizer", "IQP Stabilizer Scheme instance");
    gen_stab->add_option("n", o.n)->required();
    gen_stab->add_option("m", o.m)->required();
    gen_stab->add_option("g", o.g)->required();
    gen_stab->add_option("--redundancy-mode", o.redundancy_mode, "randomized | published | challenge-legacy");
    auto* gen_qrc = gen->add_subcommand("qrc", "(Extended) quadratic residue code instance");
    gen_qrc->add_option("q", o.q)->required();
    gen_qrc->add_option("n", o.n)->required();
    for (auto* sub : {gen_stab, gen_qrc}) {
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--out", o.out, "Output prefix")->required();
        sub->add_flag("--challenge", o.challenge, "Write only the matrix");
        sub->add_flag("--meta", o.meta, "Include construction blocks in the metadata JSON");
    }

    auto* attack = app.add_subcommand("attack", "Run an attack on a matrix file");
    attack->add_option("name", o.attack, "radical | radical-de | lazy | double-meyer | razor")
        ->required()
        ->check(CLI::IsMember({"radical", "radical-de", "lazy", "double-meyer", "razor"}));
    attack->add_option("matrix", o.matrix_path)->required();
    attack->add_option("--seed", o.seed, "Random seed");
    attack->add_option("--out", o.out, "Prefix for the report and recovered secret");
    attack->add_option("--meta", o.meta_path, "Instance metadata JSON, used to check --p");
    attack->add_option("--radical-seeds", o.radical_seed_count, "Double Meyer: stack probes from ker gram(H)");
    attack->add_flag("--import-bremner", o.import_bremner, "Read the matrix in the upstream 0/1 row layout");
    add_attack_flags(attack, o);

    auto* singletons = app.add_subcommand("singletons", "List rows i with e^i in range H");
    singletons->add_option("matrix", o.matrix_path)->required();
    singletons->add_option("--out", o.out, "Write the trimmed matrix here");
    singletons->add_flag("--import-bremner", o.import_bremner, "Read the matrix in the upstream 0/1 row layout");

    auto* verify = app.add_subcommand("verify", "Test samples against a secret");
    verify->add_option("samples", o.samples_path)->required();
    verify->add_option("secret", o.secret_path)->required();
    verify->add_option("--g", o.g_verify, "Codimension of the claimed secret")->required();
    verify->add_option("--alpha", o.alpha, "Test level")->capture_default_str();

    auto* simulate_cmd = app.add_subcommand("simulate", "Sample the exact output distribution of a small circuit");
    simulate_cmd->add_option("matrix", o.matrix_path)->required();
    simulate_cmd->add_option("--samples", o.sample_count, "Number of samples")->capture_default_str();
    simulate_cmd->add_option("--seed", o.seed, "Random seed");
    simulate_cmd->add_option("--out", o.out, "Sample file (stdout if omitted)");
    simulate_cmd->add_flag("--import-bremner", o.import_bremner, "Read the matrix in the upstream 0/1 row layout");

    auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiments");
    exp->require_subcommand(1);
    auto* sigmoid = exp->add_subcommand("sigmoid", "Radical attack success versus excess width");
    sigmoid->add_option("n", o.n)->required();
    sigmoid->add_option("m", o.m)->required();
    sigmoid->add_option("g", o.g)->required();
    sigmoid->add_option("--redundancy-mode", o.redundancy_mode, "randomized | published | challenge-legacy");
    auto* sweep = exp->add_subcommand("qrc-sweep", "Attack success over a grid of widths");
    sweep->add_option("q", o.q)->required();
    sweep->add_option("--attacks", o.attacks, "Attacks to run")->delimiter(',');
    add_attack_flags(sweep, o);
    auto* kstats = exp->add_subcommand("kernel-stats", "Kernel dimensions of probe Gram matrices");
    kstats->add_option("q", o.q)->required();
    kstats->add_option("--k", o.k_values, "Stack sizes")->delimiter(',');
    kstats->add_option("--probes", o.probes, "Probes per instance")->capture_default_str();
    for (auto* sub : {sigmoid, sweep, kstats}) {
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--trials", o.trials, "Instances (per grid point for sweeps)");
        sub->add_option("--out", o.out, "Output prefix")->required();
        sub->add_flag("--full", o.full, "Full-scale run (hours)");
    }
    for (auto* sub : {sweep, kstats}) sub->add_option("--n-grid", o.n_grid, "Widths n")->delimiter(',');

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : io_or_parse_error;
    }

    try {
        if (gen_stab->parsed()) return cmd_generate_stabilizer(o, out);
        if (gen_qrc->parsed()) return cmd_generate_qrc(o, out);
        if (attack->parsed()) return cmd_attack(o, out, err);
        if (singletons->parsed()) return cmd_singletons(o, out);
        if (verify->parsed()) return cmd_verify(o, out);
        if (simulate_cmd->parsed()) return cmd_simulate(o, out);
        if (sigmoid->parsed()) return cmd_experiment_sigmoid(o, out);
        if (sweep->parsed()) return cmd_experiment_qrc_sweep(o, out);
        if (kstats->parsed()) return cmd_experiment_kernel_stats(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return io_or_parse_error;
    }
    err << app.help();
    return io_or_parse_error;
}

}  // namespace iqp::cli
