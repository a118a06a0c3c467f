#include "iqp/attacks.hpp"

#include <bit>
#include <chrono>

#include "iqp/stats.hpp"

namespace iqp {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

BitVector complement(const BitVector& v) { return v ^ BitVector::ones(v.size()); }

// True iff rank(m) > limit; stops eliminating as soon as that is certain.
bool rank_exceeds(const BitMatrix& m, std::size_t limit) {
    auto rows = m.row_vectors();
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[r], rows[p]);
        for (std::size_t i = r + 1; i < rows.size(); ++i)
            if (rows[i].get(c)) rows[i] ^= rows[r];
        if (++r > limit) return true;
    }
    return false;
}

bool finish_with(AttackReport& report, const BitMatrix& h, const BitVector& candidate, std::size_t g_max) {
    const SecretVerdict v = validate_secret(h, candidate, g_max);
    report.certificate = v.certificate;
    if (!v.accepted()) {
        report.failure = "candidate rejected: " + to_string(v.reason);
        return false;
    }
    report.found = true;
    report.secret = candidate;
    report.failure.clear();
    return true;
}

// Solves H s = 1_rows and validates; records the outcome in report.
bool solve_for_rows(AttackReport& report, const BitMatrix& h, const BitVector& rows, std::size_t g_max) {
    const auto s = solve(h, rows);
    if (!s) {
        report.failure = "linear system has no solution";
        return false;
    }
    return finish_with(report, h, *s, g_max);
}

// Gray-code walk over the nonzero elements of ker; first valid candidate wins.
bool enumerate_kernel(AttackReport& report, const GramContext& ctx, const Subspace& ker, std::size_t g_th) {
    const auto& basis = ker.basis();
    BitVector x(ker.ambient_dim());
    const std::uint64_t count = std::uint64_t{1} << basis.size();
    for (std::uint64_t i = 1; i < count; ++i) {
        x ^= basis[static_cast<std::size_t>(std::countr_zero(i))];
        ++report.candidates_tested;
        const BitVector rows = mat_vec(ctx.h(), x);
        if (rows.is_zero() || rank_exceeds(ctx.gram_masked(rows), g_th)) continue;
        const SecretVerdict v = validate_secret(ctx.h(), x, g_th);
        if (v.accepted()) {
            report.found = true;
            report.secret = x;
            report.certificate = v.certificate;
            report.failure.clear();
            return true;
        }
    }
    return false;
}

AttackReport radical_impl(const BitMatrix& h, bool doubly_even_only) {
    const auto start = clock_type::now();
    AttackReport report;
    report.attack = doubly_even_only ? "radical-de" : "radical";
    report.iterations_used = 1;
    const Subspace ker = kernel_basis(gram(h));
    report.kernel_dims.push_back(ker.dim());
    BitVector rows(h.rows());
    for (const auto& k : ker.basis()) {
        const BitVector image = mat_vec(h, k);
        if (doubly_even_only && image.weight() % 4 != 0) continue;
        rows |= image;
    }
    ++report.candidates_tested;
    solve_for_rows(report, h, rows, unlimited);
    report.wall_seconds = seconds_since(start);
    return report;
}

}  // namespace

GramContext::GramContext(const BitMatrix& h) : h_(h), t_(transpose(h)) {}

BitMatrix GramContext::gram_masked(const BitVector& rows) const {
    const std::size_t n = h_.cols();
    BitMatrix g(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        const BitVector ta = t_.row(a) & rows;
        if (ta.is_zero()) continue;
        if (ta.weight() & 1) g.set(a, a);
        for (std::size_t b = a + 1; b < n; ++b)
            if (ta.dot(t_.row(b))) {
                g.set(a, b);
                g.set(b, a);
            }
    }
    return g;
}

AttackReport radical_attack(const BitMatrix& h) { return radical_impl(h, false); }

AttackReport radical_attack_doubly_even(const BitMatrix& h) { return radical_impl(h, true); }

AttackReport lazy_linearity_attack(const BitMatrix& h, const AttackConfig& cfg) {
    const auto start = clock_type::now();
    AttackReport report;
    report.attack = "lazy";
    report.failure = "endurance exhausted";
    const GramContext ctx(h);
    Rng rng(cfg.seed);
    for (std::size_t round = 0; round < cfg.endurance; ++round) {
        report.iterations_used = round + 1;
        const BitVector d = BitVector::random(h.cols(), rng);
        const Subspace ker = kernel_basis(ctx.probe(d));
        report.kernel_dims.push_back(ker.dim());
        if (ker.dim() < cfg.ambition && enumerate_kernel(report, ctx, ker, cfg.g_th)) break;
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

AttackReport double_meyer(const BitMatrix& h, const AttackConfig& cfg, std::span<const BitVector> seeds) {
    const auto start = clock_type::now();
    AttackReport report;
    report.attack = seeds.empty() ? "double-meyer" : "double-meyer-seeded";
    report.failure = "endurance exhausted";
    const GramContext ctx(h);
    const std::size_t n = h.cols();

    std::vector<BitVector> seeded_rows;
    for (const auto& s : seeds) {
        if (s.size() != n) throw ShapeError("double_meyer: seed length must equal the column count");
        const BitMatrix g = ctx.probe(s);
        seeded_rows.insert(seeded_rows.end(), g.row_vectors().begin(), g.row_vectors().end());
    }

    Rng rng(cfg.seed);
    for (std::size_t round = 0; round < cfg.endurance; ++round) {
        report.iterations_used = round + 1;
        std::vector<BitVector> stack = seeded_rows;
        for (std::size_t i = 0; i < cfg.k; ++i) {
            const BitMatrix g = ctx.probe(BitVector::random(n, rng));
            stack.insert(stack.end(), g.row_vectors().begin(), g.row_vectors().end());
        }
        const Subspace ker = kernel_basis(BitMatrix(n, std::move(stack)));
        report.kernel_dims.push_back(ker.dim());
        if (ker.dim() < cfg.ambition && enumerate_kernel(report, ctx, ker, cfg.g_th)) break;
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

std::vector<BitVector> radical_seeds(const BitMatrix& h, std::size_t count, Rng& rng) {
    const Subspace ker = kernel_basis(gram(h));
    std::vector<BitVector> out;
    if (ker.dim() == 0) return out;
    while (out.size() < count) {
        BitVector v = ker.random_element(rng);
        if (!v.is_zero()) out.push_back(std::move(v));
    }
    return out;
}

AttackReport escalate_threshold(const std::function<AttackReport(const AttackConfig&)>& attack, AttackConfig cfg,
                                std::size_t g_max) {
    AttackReport last;
    std::size_t rounds = 0;
    for (std::size_t g = 1; g <= g_max; ++g) {
        cfg.g_th = g;
        last = attack(cfg);
        rounds += last.iterations_used;
        if (last.found) break;
    }
    last.iterations_used = rounds;
    return last;
}

SingletonResult singleton_razor(const BitMatrix& h) {
    // e^i lies in range H iff coordinate i vanishes on all of ker H^T.
    const Subspace left_kernel = kernel_basis(transpose(h));
    BitVector covered(h.rows());
    for (const auto& y : left_kernel.basis()) covered |= y;
    SingletonResult out;
    for (std::size_t i = 0; i < h.rows(); ++i) (covered.get(i) ? out.kept_rows : out.singletons).push_back(i);
    out.trimmed = select_rows(h, out.kept_rows);
    return out;
}

AttackReport hamming_razor(const BitMatrix& h, const AttackConfig& cfg) {
    const auto start = clock_type::now();
    AttackReport report;
    report.attack = "razor";
    report.failure = "no rounds run";
    Rng rng(cfg.seed);
    BitVector redundant(h.rows());
    for (std::size_t round = 0; round < cfg.endurance; ++round) {
        report.iterations_used = round + 1;
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < h.rows(); ++i)
            if (!rng.bernoulli(cfg.p)) kept.push_back(i);
        const Subspace ker = kernel_basis(select_rows(h, kept));
        report.kernel_dims.push_back(ker.dim());
        if (ker.dim() == 0) continue;
        for (const auto& k : ker.basis()) redundant |= mat_vec(h, k);
        // Without a threshold any solvable system would validate, so only a
        // finite g_th allows stopping before the last round.
        if (cfg.g_th == unlimited) continue;
        ++report.candidates_tested;
        if (solve_for_rows(report, h, complement(redundant), cfg.g_th)) break;
    }
    if (!report.found && (cfg.g_th == unlimited || report.candidates_tested == 0)) {
        ++report.candidates_tested;
        solve_for_rows(report, h, complement(redundant), cfg.g_th);
    }
    report.wall_seconds = seconds_since(start);
    return report;
}

ProbabilityInterval suggest_p(const InstanceParams& params) {
    const double free_cols = static_cast<double>(params.n) - static_cast<double>(params.g + params.d);
    const double lo = params.m2 == 0 ? 0.0 : std::max(0.0, 1.0 - free_cols / static_cast<double>(params.m2));
    const double h = static_cast<double>(params.m1) - static_cast<double>(params.g + params.d);
    const double hi = k_infty(static_cast<double>(params.m1), std::max(0.0, h)).k_limit / static_cast<double>(params.m1);
    if (!(lo < hi)) throw EmptyInterval("suggest_p: no deletion probability satisfies both bounds");
    return {lo, hi};
}

}  // namespace iqp
