#include <gtest/gtest.h>

#include "support/criteria.hpp"

using namespace topstmin;

namespace {

Instance base(int n, std::uint64_t seed = 7) { return parse_top_instance(oracle::chao_style_text(n, 2, 30, seed)); }

GenConfig config(int mode, std::uint64_t seed) {
    GenConfig g;
    g.mandatory_mode = mode & 1 ? MandatoryMode::Scattered : MandatoryMode::Clustered;
    g.phys_mode = mode & 2 ? PhysMode::DegreeBased : PhysMode::ClustersBased;
    if (mode & 4) g.logic_mode = mode & 8 ? LogicMode::Nearest : LogicMode::Farthest;
    g.rng_seed = seed;
    return g;
}

}  // namespace

TEST(Generator, TwentyCustomersGiveOneMandatoryNode) {
    for (int mode : {0, 1}) {
        const auto inst = generate_features(base(22), config(mode, 3));
        EXPECT_EQ(inst.data().mandatory.size(), 1u);
        EXPECT_EQ(inst.variant(), Variant::P);
    }
}

TEST(Generator, ZeroRemovalKeepsEveryArc) {
    auto g = config(2, 4);
    g.edge_removal_fraction = 0;
    const auto inst = generate_features(base(22), g);
    EXPECT_TRUE(inst.data().phys.empty());
}

TEST(Generator, DegreeBasedKeepsResidualOutDegreesUniform) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = config(2, seed);
        g.mandatory_fraction = 0;
        const auto b = base(12, seed);
        const auto inst = generate_features(b, g);
        EXPECT_EQ(static_cast<int>(inst.data().phys.size()), feature_quota(0.20, 10 * 9));
        int lo = 1 << 30, hi = 0;
        for (int i = 2; i <= 11; ++i) {
            int out = 0;
            for (int j = 2; j <= 11; ++j)
                if (i != j && !oracle::raw_forbidden(inst.data(), i, j)) ++out;
            lo = std::min(lo, out);
            hi = std::max(hi, out);
        }
        EXPECT_LE(hi - lo, 1) << "seed " << seed;
    }
}

TEST(Generator, QuotasAndTerminalArcs) {
    for (int n : {22, 33}) {
        const int c = n - 2;
        for (int mode = 0; mode < 16; ++mode) {
            if ((mode & 8) && !(mode & 4)) continue;
            const auto inst = generate_features(base(n, 10 + mode), config(mode, 20 + mode));
            const auto& d = inst.data();
            EXPECT_EQ(static_cast<int>(d.mandatory.size()), (5 * c + 99) / 100);
            EXPECT_EQ(static_cast<int>(d.phys.size()), (20 * c * (c - 1) + 99) / 100);
            for (auto [i, j] : d.phys) {
                EXPECT_TRUE(inst.is_customer(i) && inst.is_customer(j));
            }
            for (int k : d.mandatory) {
                int in = 0, out = 0;
                for (int v = 1; v <= n; ++v) {
                    if (v == k) continue;
                    in += v != n && !oracle::raw_forbidden(d, v, k);
                    out += v != 1 && !oracle::raw_forbidden(d, k, v);
                }
                EXPECT_GE(in, 1);
                EXPECT_GE(out, 1);
            }
            if (mode & 4) {
                const int q = (5 * c + 99) / 100;
                EXPECT_EQ(static_cast<int>(d.logic.size()), (q * c + 1) / 2);
                std::vector<int> deg(n + 1, 0);
                for (auto [a, b] : d.logic) ++deg[a], ++deg[b];
                for (int k = 2; k <= n - 1; ++k) EXPECT_GE(deg[k], q);
            } else {
                EXPECT_TRUE(d.logic.empty());
            }
        }
    }
}

TEST(Generator, DeterministicPerSeed) {
    const auto b = base(33);
    for (int mode : {0, 7, 15}) {
        const auto a = to_extended_text(generate_features(b, config(mode, 99)));
        EXPECT_EQ(a, to_extended_text(generate_features(b, config(mode, 99))));
    }
    EXPECT_NE(to_extended_text(generate_features(b, config(7, 1))), to_extended_text(generate_features(b, config(7, 2))));
}

TEST(Generator, LabelsAndErrors) {
    EXPECT_EQ(feature_label(config(0, 1)), "CM-CPI");
    EXPECT_EQ(feature_label(config(7, 1)), "SM-DPI-FLI");
    EXPECT_EQ(feature_label(config(12, 1)), "CM-CPI-NLI");
    EXPECT_EQ(feature_quota(0.05, 20), 1);
    EXPECT_EQ(feature_quota(0.05, 21), 2);
    EXPECT_EQ(feature_quota(0, 50), 0);

    auto d = fixtures::t5().data();
    EXPECT_THROW(generate_features(Instance(d), config(0, 1)), GenerationError);
    auto g = config(0, 1);
    g.mandatory_fraction = 1.5;
    EXPECT_THROW(generate_features(base(22), g), GenerationError);
}
