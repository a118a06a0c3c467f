#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "iqp/attacks.hpp"
#include "iqp/qrc.hpp"
#include "iqp/stats.hpp"
#include "naive_gf2.hpp"

using namespace iqp;

namespace {

const ParameterLimits desk{8, 1, 100000};

IqpInstance small_instance(std::size_t n, std::size_t m, std::size_t g, Rng& rng,
                           RedundancyMode mode = RedundancyMode::Randomized) {
    return assemble_instance(n, m, g, rng, mode, desk);
}

Subspace radical_of_code(const BitMatrix& h, const BitVector& s) {
    const Subspace code = Subspace::column_span(scale_rows(h, s));
    return subspace_intersection(code, orthogonal_complement(code));
}

void check_report_valid(const BitMatrix& h, const AttackReport& rep, std::size_t g_th) {
    if (!rep.found) return;
    REQUIRE(rep.secret);
    const SecretVerdict v = validate_secret(h, *rep.secret, g_th);
    CHECK(v.accepted());
    CHECK(v.certificate == rep.certificate);
    CHECK(rep.certificate.g_actual <= g_th);
}

}  // namespace

TEST_CASE("probe equals the Gram matrix of the scaled tableau") {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const BitMatrix h = random_matrix(rng.below(60) + 1, rng.below(50) + 1, rng);
        const GramContext ctx(h);
        const BitVector d = BitVector::random(h.cols(), rng);
        CHECK(ctx.probe(d) == gram(scale_rows(h, d)));
        const BitVector rows = BitVector::random(h.rows(), rng);
        CHECK(ctx.gram_masked(rows) == gram(mask_rows(h, rows)));
    }
}

TEST_CASE("linearity implication holds for every probe on small instances") {
    Rng rng(2);
    std::size_t instances = 0, hits = 0;
    for (int t = 0; t < 12; ++t) {
        const std::size_t n = 10 + static_cast<std::size_t>(t % 5);  // 10..14
        const IqpInstance inst = small_instance(n, n + 8, 1 + t % 2, rng);
        const BitMatrix& h = inst.h;
        const BitVector& s = *inst.secret;
        const BitMatrix hs = scale_rows(h, s);
        const Subspace rad = radical_of_code(h, s);
        const GramContext ctx(h);
        ++instances;
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            BitVector d(n);
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1U) d.set(i);
            if (!rad.contains(mat_vec(hs, d))) continue;
            ++hits;
            CHECK(mat_vec(ctx.probe(d), s).is_zero());
        }
    }
    CHECK(instances == 12);
    CHECK(hits > 0);
}

TEST_CASE("per-probe chance that the planted secret lies in the probe kernel is 2^-g") {
    Rng rng(3);
    for (std::size_t g : {1, 2, 3}) {
        CAPTURE(g);
        const IqpInstance inst = small_instance(60, 80, g, rng);
        const GramContext ctx(inst.h);
        const std::size_t probes = 4000;
        std::size_t in_kernel = 0;
        for (std::size_t i = 0; i < probes; ++i)
            if (mat_vec(ctx.probe(BitVector::random(60, rng)), *inst.secret).is_zero()) ++in_kernel;
        CHECK(umpu_binomial_region(probes, std::ldexp(1.0, -static_cast<int>(g)), 0.01).contains(in_kernel));
    }
}

TEST_CASE("stacked kernel equals the intersection of kernels") {
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = rng.below(40) + 1;
        const std::size_t k = rng.below(5) + 1;
        BitMatrix stack(0, n);
        std::vector<BitVector> all;
        for (std::size_t i = 0; i < n; ++i) all.push_back(BitVector::unit(n, i));
        Subspace meet = Subspace::span(n, all);
        for (std::size_t i = 0; i < k; ++i) {
            BitMatrix g = random_matrix(n, n, rng);
            // low-rank pieces keep the intersection interesting
            for (std::size_t r = n / 2; r < n; ++r) g.set_row(r, BitVector(n));
            stack = vstack(stack, g);
            meet = subspace_intersection(meet, kernel_basis(g));
        }
        CHECK(kernel_basis(stack) == meet);
    }
}

TEST_CASE("radical attack") {
    Rng rng(5);
    SUBCASE("recovers reference-size instances with w > 18") {
        for (int t = 0; t < 10; ++t) {
            const IqpInstance inst = assemble_instance(300, 360, 4, rng);
            if (inst.params.w() <= 18) continue;
            const AttackReport rep = radical_attack(inst.h);
            CHECK(rep.found);
            CHECK(rep.secret == inst.secret);
            CHECK(rep.certificate.g_actual == 4);
            check_report_valid(inst.h, rep, unlimited);
        }
    }
    SUBCASE("invertible Gram matrix leaves nothing to solve for") {
        const BitMatrix id = BitMatrix::identity(12);
        const AttackReport rep = radical_attack(id);
        CHECK_FALSE(rep.found);
        CHECK(rep.kernel_dims == std::vector<std::size_t>{0});
        CHECK_FALSE(rep.failure.empty());
    }
    SUBCASE("outcome is invariant under re-obfuscation") {
        for (int t = 0; t < 4; ++t) {
            const IqpInstance inst = small_instance(40, 60, 2, rng);
            const bool base = radical_attack(inst.h).found;
            for (int k = 0; k < 100; ++k) {
                const Obfuscated ob = obfuscate(inst.h, *inst.secret, rng);
                const AttackReport rep = radical_attack(ob.h);
                CHECK(rep.found == base);
                if (rep.found) CHECK(rep.secret == ob.secret);
            }
        }
    }
}

TEST_CASE("doubly even filter") {
    Rng rng(6);
    SUBCASE("no-op when the plain attack succeeds") {
        std::size_t compared = 0;
        for (int t = 0; t < 100; ++t) {
            const IqpInstance inst = assemble_instance(300, 360, 4, rng);
            const AttackReport plain = radical_attack(inst.h);
            if (!plain.found) continue;
            ++compared;
            const AttackReport de = radical_attack_doubly_even(inst.h);
            CHECK(de.found);
            CHECK(de.secret == plain.secret);
        }
        CHECK(compared >= 95);
    }
    SUBCASE("rescues legacy-mode failures whose doubly even radical part is clean") {
        // On the isotropic space H(ker G), x -> |x|/2 mod 2 is linear; its kernel is
        // the doubly even part. The filter can only help when that part is range D.
        std::size_t plain_failures = 0, clean = 0, rescued_clean = 0, rescued = 0;
        for (int t = 0; t < 60; ++t) {
            const IqpInstance inst = assemble_instance(300, 360, 4, rng, RedundancyMode::ChallengeLegacy);
            const AttackReport plain = radical_attack(inst.h);
            if (plain.found && plain.secret == inst.secret) continue;
            ++plain_failures;
            const Subspace ker = kernel_basis(gram(inst.h));
            std::vector<BitVector> images, doubly_even;
            for (const auto& k : ker.basis()) images.push_back(mat_vec(inst.h, k));
            std::optional<BitVector> odd;
            for (const auto& v : images) {
                if (v.weight() / 2 % 2 == 0)
                    doubly_even.push_back(v);
                else if (!odd)
                    odd = v;
                else
                    doubly_even.push_back(v ^ *odd);
            }
            const bool is_clean =
                Subspace::span(inst.h.rows(), doubly_even) == radical_of_code(inst.h, *inst.secret);
            const AttackReport de = radical_attack_doubly_even(inst.h);
            const bool ok = de.found && de.secret == inst.secret;
            rescued += ok;
            if (is_clean) {
                ++clean;
                rescued_clean += ok;
            }
            // a contaminated doubly even part cannot be separated by any weight filter
            if (!is_clean) CHECK_FALSE(ok);
        }
        MESSAGE("legacy failures " << plain_failures << ", clean " << clean << ", rescued " << rescued);
        CHECK(plain_failures > 0);
        CHECK(clean > 0);
        CHECK(rescued >= 1);
        CHECK(static_cast<double>(rescued_clean) >= 0.8 * static_cast<double>(clean));
    }
}

TEST_CASE("lazy linearity attack") {
    Rng rng(7);
    SUBCASE("zero ambition never enumerates") {
        const IqpInstance inst = build_qrc_instance({23, 15}, rng);
        AttackConfig cfg;
        cfg.ambition = 0;
        cfg.endurance = 25;
        const AttackReport rep = lazy_linearity_attack(inst.h, cfg);
        CHECK_FALSE(rep.found);
        CHECK(rep.iterations_used == 25);
        CHECK(rep.kernel_dims.size() == 25);
        CHECK(rep.candidates_tested == 0);
    }
    SUBCASE("narrow qrc instances fall quickly") {
        for (std::size_t n : {52, 60}) {
            const IqpInstance inst = build_qrc_instance({103, n}, rng);
            AttackConfig cfg;
            cfg.seed = n;
            const AttackReport rep = lazy_linearity_attack(inst.h, cfg);
            CHECK(rep.found);
            check_report_valid(inst.h, rep, 1);
        }
    }
}

TEST_CASE("double meyer") {
    Rng rng(8);
    SUBCASE("k = 1 follows the lazy probe exactly") {
        const IqpInstance inst = build_qrc_instance({47, 40}, rng);
        AttackConfig cfg;
        cfg.k = 1;
        cfg.ambition = 0;
        cfg.endurance = 30;
        cfg.seed = 99;
        const AttackReport lazy = lazy_linearity_attack(inst.h, cfg);
        const AttackReport dm = double_meyer(inst.h, cfg);
        CHECK(lazy.kernel_dims == dm.kernel_dims);
        cfg.ambition = 8;
        cfg.endurance = 1000;
        const AttackReport lazy2 = lazy_linearity_attack(inst.h, cfg);
        const AttackReport dm2 = double_meyer(inst.h, cfg);
        CHECK(lazy2.found == dm2.found);
        CHECK(lazy2.secret == dm2.secret);
        CHECK(lazy2.iterations_used == dm2.iterations_used);
    }
    SUBCASE("extended qrc instances across the width range") {
        for (std::size_t q : {23, 47, 103}) {
            const std::size_t r = (q + 1) / 2;
            for (std::size_t n : {r, r + q / 2, r + q}) {
                CAPTURE(q);
                CAPTURE(n);
                const IqpInstance inst = build_qrc_instance({q, n}, rng);
                AttackConfig cfg;
                cfg.seed = q * 1000 + n;
                const AttackReport rep = double_meyer(inst.h, cfg);
                CHECK(rep.found);
                check_report_valid(inst.h, rep, 1);
            }
        }
    }
    SUBCASE("alternative secrets carry their own codimension") {
        std::size_t alternatives = 0;
        for (int t = 0; t < 30; ++t) {
            const IqpInstance inst = build_qrc_instance({23, 30}, rng);
            AttackConfig cfg;
            cfg.g_th = 3;
            cfg.seed = static_cast<std::uint64_t>(t);
            const AttackReport rep = double_meyer(inst.h, cfg);
            check_report_valid(inst.h, rep, 3);
            if (rep.found && rep.secret != inst.secret) {
                ++alternatives;
                CHECK(rep.certificate.g_actual >= 1);
                CHECK(certify(inst.h, *rep.secret).g_actual == rep.certificate.g_actual);
            }
        }
        MESSAGE("alternative secrets found: " << alternatives);
    }
    SUBCASE("radical seeds lie in the Gram kernel and still allow recovery") {
        const IqpInstance inst = build_qrc_instance({103, 120}, rng);
        Rng seed_rng(5);
        const auto seeds = radical_seeds(inst.h, 3, seed_rng);
        REQUIRE(seeds.size() == 3);
        const BitMatrix g = gram(inst.h);
        for (const auto& s : seeds) {
            CHECK_FALSE(s.is_zero());
            CHECK(mat_vec(g, s).is_zero());
        }
        AttackConfig cfg;
        cfg.seed = 3;
        const AttackReport rep = double_meyer(inst.h, cfg, seeds);
        CHECK(rep.found);
        check_report_valid(inst.h, rep, 1);
        CHECK_THROWS_AS(double_meyer(inst.h, cfg, std::vector<BitVector>{BitVector(3)}), ShapeError);
    }
}

TEST_CASE("threshold escalation stops at the first find") {
    Rng rng(9);
    const IqpInstance inst = small_instance(40, 56, 2, rng);
    AttackConfig cfg;
    cfg.k = 2;
    cfg.ambition = 12;
    cfg.endurance = 400;
    cfg.seed = 4;
    const AttackReport rep =
        escalate_threshold([&](const AttackConfig& c) { return double_meyer(inst.h, c); }, cfg, 4);
    CHECK(rep.found);
    check_report_valid(inst.h, rep, 4);
    CHECK(rep.certificate.g_actual <= 2);
}

TEST_CASE("singletons") {
    Rng rng(10);
    SUBCASE("identity: every row is a singleton") {
        const SingletonResult r = singleton_razor(BitMatrix::identity(9));
        CHECK(r.singletons.size() == 9);
        CHECK(r.trimmed.rows() == 0);
    }
    SUBCASE("matches the solvability oracle") {
        for (int t = 0; t < 50; ++t) {
            const std::size_t m = rng.below(30) + 2, n = rng.below(m) + 1;
            const BitMatrix h = random_matrix(m, n, rng);
            const SingletonResult r = singleton_razor(h);
            std::vector<std::size_t> expected;
            for (std::size_t i = 0; i < m; ++i)
                if (solve(h, BitVector::unit(m, i))) expected.push_back(i);
            CHECK(r.singletons == expected);
            CHECK(r.singletons.size() + r.kept_rows.size() == m);
        }
    }
    SUBCASE("never touch secret rows when range D covers them") {
        std::size_t checked = 0;
        for (int t = 0; t < 1000; ++t) {
            const IqpInstance inst = small_instance(60, 80, 2, rng, t % 2 ? RedundancyMode::ChallengeLegacy
                                                                          : RedundancyMode::Randomized);
            const Construction& c = *inst.construction;
            if (support_of_columns(c.d_block).size() != inst.params.m1) continue;
            ++checked;
            const SingletonResult r = singleton_razor(inst.h);
            std::vector<std::size_t> both;
            std::set_intersection(r.singletons.begin(), r.singletons.end(), c.secret_rows.begin(),
                                  c.secret_rows.end(), std::back_inserter(both));
            CHECK(both.empty());
            // trimming keeps the code and its certificate
            CHECK(certify(r.trimmed, *inst.secret) == certify(inst.h, *inst.secret));
        }
        CHECK(checked > 500);
    }
}

TEST_CASE("hamming razor") {
    Rng rng(11);
    SUBCASE("legacy instance, default and thresholded runs") {
        const IqpInstance inst = assemble_instance(300, 360, 4, rng, RedundancyMode::ChallengeLegacy);
        AttackConfig cfg;
        cfg.p = 0.25;
        cfg.endurance = 100;
        cfg.g_th = unlimited;
        cfg.seed = 1;
        const AttackReport full = hamming_razor(inst.h, cfg);
        CHECK(full.found);
        CHECK(full.secret == inst.secret);
        CHECK(full.iterations_used == 100);
        cfg.g_th = 4;
        const AttackReport early = hamming_razor(inst.h, cfg);
        CHECK(early.found);
        CHECK(early.secret == inst.secret);
        CHECK(early.iterations_used <= 100);
        check_report_valid(inst.h, early, 4);
    }
    SUBCASE("no redundant rows: the kernel stays trivial and H s = 1 is solved directly") {
        const std::size_t m1 = 40, g = 2, d = 6;
        Rng r2(3);
        const BitMatrix dblk = sample_D(m1, d, r2, true);
        const BitMatrix fblk = sample_F(m1, g, dblk, r2);
        const BitMatrix h = hstack(fblk, dblk);
        REQUIRE(rank(h) == g + d);
        AttackConfig cfg;
        cfg.p = 0.05;
        cfg.endurance = 20;
        cfg.g_th = unlimited;
        const AttackReport rep = hamming_razor(h, cfg);
        CHECK(std::all_of(rep.kernel_dims.begin(), rep.kernel_dims.end(), [](std::size_t k) { return k == 0; }));
        CHECK(rep.found);
        CHECK(rep.secret == BitVector::unit(g + d, 0));
    }
}

TEST_CASE("suggested deletion probabilities") {
    const InstanceParams challenge{300, 360, 4, 96, 264, 35};
    const ProbabilityInterval iv = suggest_p(challenge);
    CHECK(iv.lo < iv.hi);
    CHECK(iv.lo == doctest::Approx(1.0 - 261.0 / 264.0));
    CHECK(iv.lo == doctest::Approx(0.01).epsilon(0.2));
    CHECK(iv.hi == doctest::Approx(k_infty(96, 57).k_limit / 96));

    SUBCASE("grid oracle") {
        for (const InstanceParams& p : {challenge, InstanceParams{300, 360, 4, 102, 258, 38},
                                        InstanceParams{200, 260, 2, 90, 170, 40}}) {
            const ProbabilityInterval got = suggest_p(p);
            const double kinf = k_infty(static_cast<double>(p.m1), static_cast<double>(p.m1 - p.g - p.d)).k_limit;
            double first = -1, last = -1;
            const double step = 1e-5;
            for (double x = step; x < 1; x += step) {
                const bool ok = x * static_cast<double>(p.m2) > static_cast<double>(p.m2) - static_cast<double>(p.n - p.g - p.d) &&
                                x * static_cast<double>(p.m1) < kinf;
                if (ok && first < 0) first = x;
                if (ok) last = x;
            }
            REQUIRE(first > 0);
            CHECK(std::abs(first - got.lo) <= step);
            CHECK(std::abs(last - got.hi) <= step);
        }
    }
    SUBCASE("empty C block leaves no room") {
        CHECK_THROWS_AS(suggest_p(InstanceParams{300, 360, 4, 102, 258, 296}), EmptyInterval);
    }
}

TEST_CASE("suggested deletion range covers 0.01 to 0.13 for challenge-shaped parameters" * doctest::may_fail()) {
    const ProbabilityInterval iv = suggest_p(InstanceParams{300, 360, 4, 96, 264, 35});
    CHECK(iv.lo <= 0.01);
    CHECK(iv.hi >= 0.13);
}
