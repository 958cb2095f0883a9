#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "encyclogen/organizer.hpp"
#include "organizer_oracle.hpp"

using namespace encyclogen;
using namespace encyclogen::testutil;

namespace {

std::vector<std::string> texts(const DomainGroup& g) {
    std::vector<std::string> out;
    for (const auto& it : g.items) out.push_back(it.text);
    return out;
}

const DomainGroup* group(const EncyclopediaEntry& e, const std::string& d) {
    for (const auto& g : e.groups)
        if (g.domain == d) return &g;
    return nullptr;
}

}  // namespace

TEST(DomainWeights, NormalizeAcrossDomains) {
    auto w = domain_weights({std::log(3.0) - 2.0, std::log(1.0) - 2.0});
    EXPECT_NEAR(w[0], 0.75, 1e-12);
    EXPECT_NEAR(w[1], 0.25, 1e-12);
    auto single = domain_weights({-40.0});
    EXPECT_DOUBLE_EQ(single[0], 1.0);
    auto z = domain_weights({-INFINITY, -5.0});
    EXPECT_EQ(z[0], 0.0);
    EXPECT_DOUBLE_EQ(z[1], 1.0);
}

TEST(Organize, SingleDomainGetsWeightOne) {
    std::vector<ScoredCandidate> s{{{"t", "a t", "u", 1, Rule::kParagraph, Trigger::kPattern}, {{0.3}, true}, -4.0}};
    auto r = organize_scored("t", {"computers"}, s);
    ASSERT_EQ(r.entry.groups.size(), 1u);
    EXPECT_DOUBLE_EQ(r.entry.groups[0].items[0].domain_weight, 1.0);
    EXPECT_EQ(r.entry.status, EntryStatus::kOk);
}

TEST(Organize, KeepsTopThree) {
    std::vector<ScoredCandidate> s;
    for (int i = 0; i < 5; ++i)
        s.push_back({{"t", "d" + std::to_string(i), "u" + std::to_string(i), i + 1, Rule::kSentences, Trigger::kPattern},
                     {{1.0}, true},
                     -1.0 - i});
    auto r = organize_scored("t", {"computers"}, s, {0.05, 3});
    ASSERT_EQ(r.entry.groups.size(), 1u);
    EXPECT_EQ(texts(r.entry.groups[0]), (std::vector<std::string>{"d0", "d1", "d2"}));
    EXPECT_EQ(std::count_if(r.audit.begin(), r.audit.end(), [](const AuditRecord& a) { return a.reason == "beyond-top-k"; }), 2);
}

TEST(Organize, HandInstance) {
    auto r = organize_scored("router", {"computers", "finance"}, hand_instance(), {0.05, 3});
    ASSERT_EQ(r.entry.groups.size(), 2u);
    // computers best item -0.901 beats finance best -1.520
    EXPECT_EQ(r.entry.groups[0].domain, "computers");
    EXPECT_EQ(texts(r.entry.groups[0]), (std::vector<std::string>{"text1", "text2", "text5"}));
    EXPECT_EQ(texts(r.entry.groups[1]), (std::vector<std::string>{"text3", "text1", "text4"}));
    EXPECT_NEAR(r.entry.groups[0].items[0].domain_weight, 0.75, 1e-12);
    EXPECT_NEAR(r.entry.groups[1].items[0].log_combined, std::log(0.98) - 1.5, 1e-12);
    EXPECT_TRUE(same_as_oracle(r.entry, oracle_organize({"computers", "finance"}, hand_instance(), 0.05, 3), 1e-12));
    bool below = false;
    for (const auto& a : r.audit) below |= a.reason == "below-threshold" && a.url == "http://h/3" && a.domain == "computers";
    EXPECT_TRUE(below);
}

TEST(Organize, TiesBreakOnRank) {
    std::vector<ScoredCandidate> s{{{"t", "b", "u2", 2, Rule::kSentences, Trigger::kPattern}, {{1.0}, true}, -1.0},
                                   {{"t", "a", "u1", 1, Rule::kSentences, Trigger::kPattern}, {{1.0}, true}, -1.0}};
    auto r = organize_scored("t", {"x"}, s);
    EXPECT_EQ(texts(r.entry.groups[0]), (std::vector<std::string>{"a", "b"}));
}

TEST(Organize, MatchesBruteForceOracle) {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t nd = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        std::size_t nc = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
        auto scored = random_scored(rng, nd, nc);
        double threshold = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
        std::size_t k = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        auto domains = domain_names(nd);
        auto r = organize_scored("term", domains, scored, {threshold, k});
        EXPECT_TRUE(same_as_oracle(r.entry, oracle_organize(domains, scored, threshold, k), 1e-9)) << "trial " << trial;
    }
}

TEST(Organize, ThresholdMonotone) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto scored = random_scored(rng, 4, 10);
        auto domains = domain_names(4);
        auto lo = organize_scored("t", domains, scored, {0.1, 100});
        auto hi = organize_scored("t", domains, scored, {0.4, 100});
        for (const auto& g : hi.entry.groups) {
            const auto* other = group(lo.entry, g.domain);
            ASSERT_NE(other, nullptr);
            for (const auto& it : g.items) EXPECT_NE(std::find(other->items.begin(), other->items.end(), it), other->items.end());
        }
    }
}

TEST(Organize, TopKIsPrefix) {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        auto scored = random_scored(rng, 3, 12);
        auto domains = domain_names(3);
        auto small = organize_scored("t", domains, scored, {0.05, 2});
        auto big = organize_scored("t", domains, scored, {0.05, 5});
        for (const auto& g : small.entry.groups) {
            const auto* other = group(big.entry, g.domain);
            ASSERT_NE(other, nullptr);
            ASSERT_GE(other->items.size(), g.items.size());
            EXPECT_TRUE(std::equal(g.items.begin(), g.items.end(), other->items.begin()));
        }
    }
}

TEST(Organize, PermutationInvariant) {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto scored = random_scored(rng, 3, 8);
        auto domains = domain_names(3);
        auto a = organize_scored("t", domains, scored);
        std::shuffle(scored.begin(), scored.end(), rng);
        EXPECT_EQ(organize_scored("t", domains, scored).entry, a.entry);
    }
}

TEST(Organize, EmptyWhenNothingSurvives) {
    auto r = organize_scored("t", {"x"}, {});
    EXPECT_EQ(r.entry.status, EntryStatus::kEmpty);
    std::vector<ScoredCandidate> s{{{"t", "a", "u", 1, Rule::kSentences, Trigger::kPattern}, {{0.0}, false}, -1.0},
                                   {{"t", "b", "v", 2, Rule::kSentences, Trigger::kPattern}, {{1.0}, true}, std::nullopt}};
    r = organize_scored("t", {"x"}, s);
    EXPECT_EQ(r.entry.status, EntryStatus::kEmpty);
    ASSERT_EQ(r.audit.size(), 2u);
    EXPECT_EQ(r.audit[0].reason, "unscorable-domain");
    EXPECT_EQ(r.audit[1].reason, "unscorable-description");
}

TEST(Organize, RejectsBadOptions) {
    EXPECT_THROW(organize_scored("t", {"x"}, {}, {1.5, 3}), ConfigError);
    EXPECT_THROW(organize_scored("t", {"x"}, {}, {0.05, 0}), ConfigError);
}

TEST(Organize, EndToEndWithModels) {
    UnicodeTokenizer tok;
    DomainLexicon lex{{"computers", "construction"},
                      {{"a router forwards packets between networks", "computers"},
                       {"a router cuts grooves in wood", "construction"}}};
    auto dm = train_domain_model(lex, tok);
    auto lm = train_trigram({{{"router", "a router forwards packets. a router cuts wood."}}}, tok);
    std::vector<Candidate> c{{"router", "A router forwards packets between networks.", "http://a", 1, Rule::kParagraph, Trigger::kPattern},
                             {"router", "A router cuts grooves in wood.", "http://b", 2, Rule::kParagraph, Trigger::kPattern}};
    auto r = organize("router", c, dm, lm, tok);
    ASSERT_EQ(r.entry.groups.size(), 2u);
    EXPECT_EQ(group(r.entry, "computers")->items[0].url, "http://a");
    EXPECT_EQ(group(r.entry, "construction")->items[0].url, "http://b");
    ExternalTokenizer other("cat");
    EXPECT_THROW(organize("router", c, dm, lm, other), ConfigError);
}
