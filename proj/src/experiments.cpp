#include "iqp/experiments.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "iqp/io.hpp"
#include "iqp/qrc.hpp"

namespace iqp {

namespace {

std::string describe(const std::string& attack, const AttackConfig& cfg) {
    std::ostringstream ss;
    if (attack == "lazy")
        ss << "A=" << cfg.ambition << " E=" << cfg.endurance << " gth=" << cfg.g_th;
    else if (attack == "double-meyer")
        ss << "k=" << cfg.k << " A=" << cfg.ambition << " E=" << cfg.endurance << " gth=" << cfg.g_th;
    else if (attack == "razor")
        ss << "p=" << cfg.p << " E=" << cfg.endurance;
    else
        ss << "-";
    return ss.str();
}

ExperimentRecord make_record(const IqpInstance& inst, const std::string& attack, const std::string& config,
                             const AttackReport& rep, std::uint64_t master, std::uint64_t instance_seed) {
    ExperimentRecord r;
    r.family = to_string(inst.family);
    r.attack = attack;
    r.n = inst.params.n;
    r.m = inst.params.m;
    r.g = inst.params.g;
    r.m1 = inst.params.m1;
    r.m2 = inst.params.m2;
    r.d = inst.params.d;
    r.w = inst.params.w();
    r.config = config;
    r.found = rep.found;
    r.success = rep.found && inst.secret && *rep.secret == *inst.secret;
    r.iterations = rep.iterations_used;
    r.candidates = rep.candidates_tested;
    r.kernel_dims = rep.kernel_dims;
    r.master_seed = master;
    r.instance_seed = instance_seed;
    r.wall_seconds = rep.wall_seconds;
    return r;
}

}  // namespace

std::size_t worker_count() {
    if (const char* env = std::getenv("IQP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<ExperimentRecord> run_sigmoid_experiment(std::size_t n, std::size_t m, std::size_t g, std::size_t trials,
                                                     std::uint64_t seed, RedundancyMode mode) {
    return parallel_map<ExperimentRecord>(trials, [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        Rng rng(s);
        const IqpInstance inst = assemble_instance(n, m, g, rng, mode);
        return make_record(inst, "radical", "-", radical_attack(inst.h), seed, s);
    });
}

std::vector<ExperimentRecord> run_stratified_sigmoid(std::size_t n, std::size_t m, std::size_t g,
                                                     const std::vector<long>& w_values, std::size_t per_w,
                                                     std::uint64_t seed) {
    for (long w : w_values) {
        const long m1 = static_cast<long>(m) - static_cast<long>(n) + static_cast<long>(g) + w;
        if (m1 < static_cast<long>(g) + 2 || m1 > static_cast<long>(m) || (m1 - static_cast<long>(g)) % 2 != 0)
            throw std::invalid_argument("run_stratified_sigmoid: w = " + std::to_string(w) + " gives no admissible m1");
    }
    return parallel_map<ExperimentRecord>(w_values.size() * per_w, [&](std::size_t i) {
        const long w = w_values[i / per_w];
        const std::size_t m1 = static_cast<std::size_t>(static_cast<long>(m) - static_cast<long>(n) +
                                                        static_cast<long>(g) + w);
        const std::uint64_t s = derive_seed(seed, i);
        Rng rng(s);
        const std::size_t d_max = (m1 - g) / 2;
        const std::size_t d_min = static_cast<std::size_t>(std::max<long>(w, 1));
        std::size_t d = 0;
        for (int attempt = 0;; ++attempt) {
            d = rng.binomial(d_max, 0.75);
            if (d >= d_min && g + d <= n) break;
            if (attempt > 100000) throw ParameterExhaustion("run_stratified_sigmoid: no admissible d");
        }
        const IqpInstance inst = assemble_instance_with(n, m, g, m1, d, rng);
        return make_record(inst, "radical", "-", radical_attack(inst.h), seed, s);
    });
}

std::vector<WBin> summarize_by_w(const std::vector<ExperimentRecord>& records, std::size_t n, std::size_t m,
                                 std::size_t g, double alpha) {
    std::map<long, WBin> bins;
    for (const auto& r : records) {
        WBin& b = bins[r.w];
        b.w = r.w;
        ++b.trials;
        if (r.success) ++b.successes;
    }
    std::vector<WBin> out;
    for (auto& [w, b] : bins) {
        b.theory = success_theory_simple(static_cast<double>(w), n, m, g);
        b.region = umpu_binomial_region(b.trials, b.theory, alpha);
        b.consistent = b.region.contains(b.successes);
        out.push_back(b);
    }
    return out;
}

std::optional<double> empirical_half_width(const std::vector<WBin>& bins) {
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double rate = static_cast<double>(bins[i].successes) / static_cast<double>(bins[i].trials);
        if (rate < 0.5) continue;
        if (i == 0) return static_cast<double>(bins[0].w);
        const double prev = static_cast<double>(bins[i - 1].successes) / static_cast<double>(bins[i - 1].trials);
        const double x0 = static_cast<double>(bins[i - 1].w), x1 = static_cast<double>(bins[i].w);
        return x0 + (0.5 - prev) / (rate - prev) * (x1 - x0);
    }
    return std::nullopt;
}

AttackReport run_named_attack(const std::string& name, const BitMatrix& h, const AttackConfig& cfg) {
    if (name == "radical") return radical_attack(h);
    if (name == "radical-de") return radical_attack_doubly_even(h);
    if (name == "lazy") return lazy_linearity_attack(h, cfg);
    if (name == "double-meyer") return double_meyer(h, cfg);
    if (name == "razor") return hamming_razor(h, cfg);
    throw std::invalid_argument("unknown attack '" + name + "'");
}

std::vector<ExperimentRecord> run_qrc_sweep(std::size_t q, const std::vector<std::size_t>& n_grid,
                                            const std::vector<std::string>& attacks, std::size_t per_point,
                                            std::uint64_t seed, const AttackConfig& cfg) {
    for (auto n : n_grid) check_qrc_params({q, n});
    const auto nested = parallel_map<std::vector<ExperimentRecord>>(n_grid.size() * per_point, [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, i);
        Rng rng(s);
        const IqpInstance inst = build_qrc_instance({q, n_grid[i / per_point]}, rng);
        std::vector<ExperimentRecord> out;
        for (std::size_t a = 0; a < attacks.size(); ++a) {
            AttackConfig c = cfg;
            c.seed = derive_seed(s, a + 1);
            ExperimentRecord r =
                make_record(inst, attacks[a], describe(attacks[a], c), run_named_attack(attacks[a], inst.h, c), seed, s);
            r.q = q;
            out.push_back(std::move(r));
        }
        return out;
    });
    std::vector<ExperimentRecord> flat;
    for (const auto& v : nested) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

std::vector<SweepPoint> summarize_sweep(const std::vector<ExperimentRecord>& records) {
    std::map<std::pair<std::size_t, std::string>, SweepPoint> points;
    std::map<std::size_t, std::set<std::uint64_t>> solved;
    for (const auto& r : records) {
        SweepPoint& p = points[{r.n, r.attack}];
        p.n = r.n;
        p.attack = r.attack;
        ++p.trials;
        if (r.success) {
            ++p.successes;
            solved[r.n].insert(r.instance_seed);
        }
    }
    std::vector<SweepPoint> out;
    for (auto& [key, p] : points) {
        p.union_successes = solved[p.n].size();
        out.push_back(p);
    }
    return out;
}

std::vector<KernelRecord> run_kernel_stats(std::size_t q, const std::vector<std::size_t>& n_grid,
                                           const std::vector<std::size_t>& k_values, std::size_t instances,
                                           std::size_t probes, std::uint64_t seed) {
    for (auto n : n_grid) check_qrc_params({q, n});
    const auto nested = parallel_map<std::vector<KernelRecord>>(n_grid.size() * instances, [&](std::size_t i) {
        const std::size_t n = n_grid[i / instances];
        const std::uint64_t s = derive_seed(seed, i);
        Rng rng(s);
        const IqpInstance inst = build_qrc_instance({q, n}, rng);
        const GramContext ctx(inst.h);
        std::vector<KernelRecord> out;
        for (std::size_t p = 0; p < probes; ++p) {
            for (auto k : k_values) {
                KernelRecord r;
                r.n = n;
                r.instance = i % instances;
                r.probe = p;
                r.k = k;
                std::vector<BitVector> stack;
                for (std::size_t j = 0; j < k; ++j) {
                    const BitVector d = BitVector::random(n, rng);
                    if (k == 1) r.dim_ker_hd = kernel_basis(scale_rows(inst.h, d)).dim();
                    const BitMatrix g = ctx.probe(d);
                    stack.insert(stack.end(), g.row_vectors().begin(), g.row_vectors().end());
                }
                r.dim_ker_gram = kernel_basis(BitMatrix(n, std::move(stack))).dim();
                out.push_back(r);
            }
        }
        return out;
    });
    std::vector<KernelRecord> flat;
    for (const auto& v : nested) flat.insert(flat.end(), v.begin(), v.end());
    return flat;
}

std::vector<KernelSummary> summarize_kernel_stats(const std::vector<KernelRecord>& records, std::size_t q) {
    std::map<std::pair<std::size_t, std::size_t>, KernelSummary> acc;
    for (const auto& r : records) {
        KernelSummary& s = acc[{r.n, r.k}];
        s.n = r.n;
        s.k = r.k;
        ++s.samples;
        s.mean_ker_gram += static_cast<double>(r.dim_ker_gram);
        s.mean_ker_hd += static_cast<double>(r.dim_ker_hd);
    }
    std::vector<KernelSummary> out;
    for (auto& [key, s] : acc) {
        s.mean_ker_gram /= static_cast<double>(s.samples);
        s.mean_ker_hd /= static_cast<double>(s.samples);
        s.prediction = std::exp2(1.0 - static_cast<double>(s.k)) * (static_cast<double>(s.n) - static_cast<double>(q));
        out.push_back(s);
    }
    return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more points");
    const double count = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / count, my = sy / count;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: x values are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream ss;
    ss << "family,attack,n,m,g,q,m1,m2,d,w,config,success,found,iterations,candidates,kernel_dim_first,master_seed,"
          "instance_seed,wall_time\n";
    for (const auto& r : records) {
        ss << r.family << ',' << r.attack << ',' << r.n << ',' << r.m << ',' << r.g << ',' << r.q << ',' << r.m1 << ','
           << r.m2 << ',' << r.d << ',' << r.w << ',' << r.config << ',' << (r.success ? 1 : 0) << ','
           << (r.found ? 1 : 0) << ',' << r.iterations << ',' << r.candidates << ','
           << (r.kernel_dims.empty() ? 0 : r.kernel_dims.front()) << ',' << r.master_seed << ',' << r.instance_seed
           << ',' << r.wall_seconds << '\n';
    }
    return ss.str();
}

nlohmann::json to_json(const ExperimentRecord& r) {
    return {{"family", r.family},         {"attack", r.attack},     {"n", r.n},
            {"m", r.m},                   {"g", r.g},               {"q", r.q},
            {"m1", r.m1},                 {"m2", r.m2},             {"d", r.d},
            {"w", r.w},                   {"config", r.config},     {"success", r.success},
            {"found", r.found},           {"iterations", r.iterations}, {"candidates", r.candidates},
            {"kernel_dims", r.kernel_dims}, {"master_seed", r.master_seed}, {"instance_seed", r.instance_seed},
            {"wall_time", r.wall_seconds}};
}

std::string records_jsonl(const std::vector<ExperimentRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::string bins_csv(const std::vector<WBin>& bins) {
    std::ostringstream ss;
    ss << "w,trials,successes,rate,theory,accept_lo,accept_hi,consistent\n";
    for (const auto& b : bins)
        ss << b.w << ',' << b.trials << ',' << b.successes << ','
           << static_cast<double>(b.successes) / static_cast<double>(b.trials) << ',' << b.theory << ','
           << b.region.lo << ',' << b.region.hi << ',' << (b.consistent ? 1 : 0) << '\n';
    return ss.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream ss;
    ss << "n,attack,trials,successes,rate,union_successes\n";
    for (const auto& p : points)
        ss << p.n << ',' << p.attack << ',' << p.trials << ',' << p.successes << ','
           << static_cast<double>(p.successes) / static_cast<double>(p.trials) << ',' << p.union_successes << '\n';
    return ss.str();
}

std::string kernel_records_csv(const std::vector<KernelRecord>& records) {
    std::ostringstream ss;
    ss << "n,instance,probe,k,dim_ker_gram,dim_ker_hd\n";
    for (const auto& r : records)
        ss << r.n << ',' << r.instance << ',' << r.probe << ',' << r.k << ',' << r.dim_ker_gram << ',' << r.dim_ker_hd
           << '\n';
    return ss.str();
}

std::string kernel_summary_csv(const std::vector<KernelSummary>& summary) {
    std::ostringstream ss;
    ss << "n,k,samples,mean_dim_ker_gram,mean_dim_ker_hd,prediction\n";
    for (const auto& s : summary)
        ss << s.n << ',' << s.k << ',' << s.samples << ',' << s.mean_ker_gram << ',' << s.mean_ker_hd << ','
           << s.prediction << '\n';
    return ss.str();
}

}  // namespace iqp
