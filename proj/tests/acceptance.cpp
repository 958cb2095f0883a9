// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cli_util.hpp"
#include "domain_oracle.hpp"
#include "encyclogen/pipeline.hpp"
#include "organizer_oracle.hpp"
#include "qa_oracle.hpp"
#include "test_util.hpp"

using namespace encyclogen;
using namespace encyclogen::testutil;

namespace {

const UnicodeTokenizer kTok;

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

bool report(int number, const char* name, double limit_s, const std::function<Check()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
        c = body();
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) c.expect(false, "took " + std::to_string(secs) + " s");
    std::printf("%s  %d. %s (%.2f s)%s%s\n", c.ok ? "PASS" : "FAIL", number, name, secs, c.ok ? "" : ": ", c.detail.c_str());
    return c.ok;
}

Check domain_score_oracle() {
    Check c;
    std::mt19937 rng(1);
    auto pool = word_pool(20);
    for (int trial = 0; trial < 100; ++trial) {
        auto lex = random_lexicon(rng, 6, 60, pool);
        auto model = train_domain_model(lex, kTok);
        std::string text;
        int n = std::uniform_int_distribution<int>(1, 15)(rng);
        for (int i = 0; i < n; ++i) text += random_word(rng, pool) + (i % 5 == 4 ? " unknownword " : " ");
        auto got = domain_posterior(model, text, kTok);
        auto want = oracle_domain_scores(lex, text, kTok);
        for (std::size_t d = 0; d < want.size(); ++d) {
            double err = std::abs(got.scores[d] - want[d]) / std::max(1.0, std::abs(want[d]));
            c.expect(err <= 1e-12, "trial " + std::to_string(trial) + " domain " + std::to_string(d));
        }
    }
    return c;
}

Check trigram_normalization() {
    Check c;
    std::mt19937 rng(2);
    auto pool = word_pool(30);
    ReferenceCorpus corpus;
    for (int i = 0; i < 40; ++i) {
        std::string body;
        for (int s = 0; s < 5; ++s) body += random_sentence(rng, pool, 2, 10) + " ";
        corpus.articles.push_back({pool[static_cast<std::size_t>(i % 30)], body});
    }
    auto m = train_trigram(corpus, kTok);
    std::uniform_int_distribution<TrigramModel::Id> pick(0, static_cast<TrigramModel::Id>(m.vocabulary_size() - 1));
    auto outcomes = m.outcomes();
    for (int i = 0; i < 1000; ++i) {
        TrigramModel::Id u = pick(rng), v = pick(rng);
        double sum = 0.0;
        for (auto w : outcomes) sum += m.probability(u, v, w);
        c.expect(std::abs(sum - 1.0) <= 1e-9, "context " + std::to_string(u) + "," + std::to_string(v));
    }

    // ten sentences; unsmoothed estimates against counts taken from the token streams
    ReferenceCorpus ten;
    std::vector<std::vector<std::string>> streams;
    for (int i = 0; i < 10; ++i) {
        std::string s = random_sentence(rng, {"a", "b", "c", "d"}, 2, 6);
        ten.articles.push_back({"zz", s});
        auto toks = kTok.tokenize(s);
        std::vector<std::string> st{"<s>", "<s>"};
        st.insert(st.end(), toks.begin(), toks.end());
        st.push_back("</s>");
        streams.push_back(st);
    }
    auto lm = train_trigram(ten, kTok);
    std::map<std::tuple<std::string, std::string, std::string>, double> tri;
    std::map<std::pair<std::string, std::string>, double> ctx;
    for (const auto& s : streams)
        for (std::size_t i = 2; i < s.size(); ++i) {
            ++tri[{s[i - 2], s[i - 1], s[i]}];
            ++ctx[{s[i - 2], s[i - 1]}];
        }
    for (const auto& [k, n] : tri) {
        const auto& [u, v, w] = k;
        c.expect(lm.ml_probability(lm.id(u), lm.id(v), lm.id(w)) == n / ctx[std::make_pair(u, v)], "ML " + u + " " + v + " " + w);
    }
    return c;
}

Check duplication_invariance() {
    Check c;
    std::mt19937 rng(3);
    auto pool = word_pool(25);
    ReferenceCorpus corpus;
    for (int i = 0; i < 30; ++i) corpus.articles.push_back({pool[static_cast<std::size_t>(i % 25)], random_sentence(rng, pool, 3, 12)});
    auto m = train_trigram(corpus, kTok);
    auto extended = pool;
    extended.push_back("neverseen");
    for (int i = 0; i < 100; ++i) {
        std::string d = random_sentence(rng, extended, 1, 12);
        double once = score_description(m, d, pool[0], kTok);
        int k = std::uniform_int_distribution<int>(2, 5)(rng);
        std::string rep;
        for (int j = 0; j < k; ++j) rep += d + " ";
        c.expect(std::abs(score_description(m, rep, pool[0], kTok) - once) <= 1e-9, "description " + std::to_string(i));
    }
    return c;
}

Check extraction_order() {
    Check c;
    auto patterns = parse_patterns("TERM is a\n", kTok);
    const std::string dd = "<dd>Forwards packets between networks.</dd>";
    const std::string p = "<p>A device on a network.</p>";
    const std::string ul = "<ul><li>Networking hardware.</li></ul>";
    const std::string tail = "<div>One fact. Two facts. Three facts. Four facts. Five facts.</div>";
    auto first = [&](const std::string& html) {
        auto pages = std::vector<Page>{normalize(Page{"http://x", 1, html, {}})};
        auto out = extract_all(pages, "router", patterns, kTok);
        if (out.empty()) throw ExtractionError("no candidate");
        return out.front();
    };
    auto a = first("<dl><dt>Router</dt>" + dd + "</dl>" + p + ul + tail);
    c.expect(a.rule == Rule::kDdAfterDt && a.text == "Forwards packets between networks.", "DD not chosen");
    auto b = first("<dl><dt>Router</dt></dl>" + p + ul + tail);
    c.expect(b.rule == Rule::kParagraph && b.text == "A device on a network.", "P not chosen");
    auto u = first("<dl><dt>Router</dt></dl>" + ul + tail);
    c.expect(u.rule == Rule::kItemization && u.text == "Networking hardware.", "UL not chosen");
    auto s = first("<dl><dt>Router</dt></dl>" + tail);
    c.expect(s.rule == Rule::kSentences && sentence_spans(s.text).size() == 3 && s.text == "One fact. Two facts. Three facts.",
             "sentence rule gave '" + s.text + "'");
    return c;
}

Check organizer_properties() {
    Check c;
    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t nd = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
        auto domains = domain_names(nd);
        auto scored = random_scored(rng, nd, 10);
        double t1 = std::uniform_real_distribution<double>(0.0, 0.5)(rng), t2 = t1 + 0.2;
        std::size_t k1 = std::uniform_int_distribution<std::size_t>(1, 3)(rng), k2 = k1 + 2;
        auto lo = organize_scored("t", domains, scored, {t1, 100}).entry;
        auto hi = organize_scored("t", domains, scored, {t2, 100}).entry;
        for (const auto& g : hi.groups) {
            auto it = std::find_if(lo.groups.begin(), lo.groups.end(), [&](const DomainGroup& x) { return x.domain == g.domain; });
            c.expect(it != lo.groups.end(), "threshold: domain vanished");
            if (it == lo.groups.end()) continue;
            for (const auto& item : g.items)
                c.expect(std::find(it->items.begin(), it->items.end(), item) != it->items.end(), "threshold: item vanished");
        }
        auto small = organize_scored("t", domains, scored, {0.05, k1}).entry;
        auto big = organize_scored("t", domains, scored, {0.05, k2}).entry;
        for (const auto& g : small.groups) {
            auto it = std::find_if(big.groups.begin(), big.groups.end(), [&](const DomainGroup& x) { return x.domain == g.domain; });
            c.expect(it != big.groups.end() && it->items.size() >= g.items.size() &&
                         std::equal(g.items.begin(), g.items.end(), it->items.begin()),
                     "top-k: not a prefix");
        }
    }
    auto hand = organize_scored("router", {"computers", "finance"}, hand_instance(), {0.05, 3}).entry;
    c.expect(same_as_oracle(hand, oracle_organize({"computers", "finance"}, hand_instance(), 0.05, 3), 0.0), "hand instance differs");
    c.expect(hand.groups.size() == 2 && hand.groups[0].domain == "computers" && hand.groups[0].items.size() == 3 &&
                 hand.groups[0].items[2].text == "text5" && hand.groups[1].items[0].text == "text3",
             "hand instance layout");
    return c;
}

Check qa_properties() {
    Check c;
    auto p = planted_questions(40);
    auto a = kb_of(p.store_a), b = kb_of(p.store_b);
    auto both = KnowledgeBase::merged({&a, &b});
    AnswerOptions rnd;
    rnd.fallback = {true, 7};
    for (const auto* kb : {&a, &b, &both}) c.expect(evaluate(p.questions, *kb, kTok, rnd).coverage() == 1.0, "random coverage");
    auto ra = evaluate(p.questions, a, kTok), rb = evaluate(p.questions, b, kTok), ru = evaluate(p.questions, both, kTok);
    c.expect(ru.coverage() >= ra.coverage() && ru.coverage() >= rb.coverage(), "union coverage");
    c.expect(ru.accuracy() && *ru.accuracy() == 1.0, "planted accuracy");
    return c;
}

Check deterministic_generate() {
    Check c;
    auto x = temp_path("acceptance") / "a.jsonl";
    auto y = temp_path("acceptance") / "b.jsonl";
    c.expect(generate_fixture(x).status == 0 && generate_fixture(y).status == 0, "generate failed");
    c.expect(!read_file(x).empty() && read_file(x) == read_file(y), "outputs differ");
    return c;
}

Check stats_output() {
    Check c;
    auto store = temp_path("acceptance") / "stats.jsonl";
    c.expect(generate_fixture(store).status == 0, "generate failed");
    auto r = run_cli({"--json", "stats", "--store", store.string()});
    c.expect(r.status == 0, "stats failed");
    auto j = nlohmann::json::parse(r.out);
    const auto& hist = j.at("rank_histogram");
    std::size_t pages = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        c.expect(hist[i]["first_rank"] == 50 * i + 1 && hist[i]["last_rank"] == 50 * (i + 1), "bucket bounds");
        pages += hist[i]["pages"].get<std::size_t>();
    }
    c.expect(hist.size() == 20 && pages > 0, "histogram");
    std::size_t total = 0;
    for (const auto& d : j.at("domain_distribution")) total += d["descriptions"].get<std::size_t>();
    c.expect(!j["domain_distribution"].empty() && total == j["descriptions"].get<std::size_t>(), "domain table");
    auto text = run_cli({"stats", "--store", store.string()}).out;
    c.expect(text.find("groups of 50") != std::string::npos && text.find("computers (") != std::string::npos, "text report");
    return c;
}

}  // namespace

int main() {
    bool ok = true;
    ok &= report(1, "domain score equals brute-force oracle on 100 random lexicons", 5.0, domain_score_oracle);
    ok &= report(2, "trigram conditionals sum to 1; unsmoothed estimates equal hand counts", 5.0, trigram_normalization);
    ok &= report(3, "per-word description score unchanged by duplicating sentences", 0, duplication_invariance);
    ok &= report(4, "extraction prefers DD, then P, then UL, then 3 sentences", 0, extraction_order);
    ok &= report(5, "organizer threshold and top-k monotone; hand instance matches oracle", 0, organizer_properties);
    ok &= report(6, "QA fallback coverage, union coverage and planted accuracy", 10.0, qa_properties);
    ok &= report(7, "generate is byte-for-byte reproducible", 0, deterministic_generate);
    ok &= report(8, "stats reports rank histogram in groups of 50 and domain counts", 0, stats_output);
    return ok ? 0 : 1;
}
