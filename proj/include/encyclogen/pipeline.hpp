#pragma once

// Wiring used by the command-line tool: configuration, model files and the per-term
// generate flow (ingest, extract, organize, save).

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "encyclogen/corpus.hpp"
#include "encyclogen/domain_model.hpp"
#include "encyclogen/error.hpp"
#include "encyclogen/extractor.hpp"
#include "encyclogen/organizer.hpp"
#include "encyclogen/qa.hpp"
#include "encyclogen/stats.hpp"
#include "encyclogen/store.hpp"
#include "encyclogen/tokenizer.hpp"
#include "encyclogen/trigram.hpp"

namespace encyclogen {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitEmpty = 4 };

struct PipelineConfig {
    std::string corpus;
    std::string lexicon;
    std::string reference;
    std::string patterns;
    std::string store;
    std::string domain_model;  // trained model file; takes precedence over `lexicon`
    std::string language_model;  // trained model file; takes precedence over `reference`
    std::string audit;
    std::size_t max_pages = 1000;
    std::size_t n_sentences = 3;
    double threshold = 0.05;
    std::size_t top_k = 3;
    double k1 = 1.2;
    double b = 0.75;
    std::uint64_t seed = 0;
    std::string tokenizer = "unicode-default";

    void validate() const {
        if (max_pages < 1) throw ConfigError("max-pages must be at least 1");
        if (n_sentences < 1) throw ConfigError("n-sentences must be at least 1");
        if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
        if (top_k < 1) throw ConfigError("top-k must be at least 1");
        if (!(k1 >= 0.0)) throw ConfigError("k1 must be non-negative");
        if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("b must lie in [0, 1]");
        for (const std::string* p : {&corpus, &lexicon, &reference, &patterns, &domain_model, &language_model}) {
            if (!p->empty() && !std::filesystem::exists(*p)) throw ConfigError("path '" + *p + "' does not exist");
        }
    }

    static void require(const std::string& value, const char* what) {
        if (value.empty()) throw ConfigError(std::string("missing required setting: ") + what);
    }
};

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << j.dump() << '\n';
}

inline DomainModel obtain_domain_model(const PipelineConfig& cfg, const Tokenizer& tokenizer) {
    if (!cfg.domain_model.empty()) {
        auto m = DomainModel::from_json(read_json_file(cfg.domain_model));
        require_fingerprint(m.tokenizer_fingerprint(), tokenizer, "domain model '" + cfg.domain_model + "'");
        return m;
    }
    PipelineConfig::require(cfg.lexicon, "lexicon or domain-model");
    return train_domain_model(load_lexicon(cfg.lexicon), tokenizer);
}

inline TrigramModel obtain_language_model(const PipelineConfig& cfg, const Tokenizer& tokenizer) {
    if (!cfg.language_model.empty()) {
        auto m = TrigramModel::from_json(read_json_file(cfg.language_model));
        require_fingerprint(m.tokenizer_fingerprint(), tokenizer, "description model '" + cfg.language_model + "'");
        return m;
    }
    PipelineConfig::require(cfg.reference, "reference or language-model");
    return train_trigram(load_reference_corpus(cfg.reference), tokenizer);
}

inline nlohmann::json candidate_to_json(const Candidate& c) {
    return {{"term", c.term},
            {"text", c.text},
            {"url", c.source_url},
            {"rank", c.source_rank},
            {"rule", to_string(c.rule)},
            {"trigger", to_string(c.trigger)}};
}

struct TermReport {
    std::string term;
    std::size_t pages = 0;
    std::size_t dropped_missing_term = 0;
    std::size_t record_errors = 0;
    std::size_t candidates = 0;
    OrganizeResult organized;

    nlohmann::json summary() const {
        return {{"term", term},
                {"pages", pages},
                {"dropped_missing_term", dropped_missing_term},
                {"record_errors", record_errors},
                {"candidates", candidates},
                {"status", organized.entry.status == EntryStatus::kOk ? "ok" : "empty"},
                {"domains", organized.entry.groups.size()},
                {"descriptions", organized.entry.item_count()}};
    }
};

/// Runs ingest, extract and organize for each term and saves the entries to the store.
inline std::vector<TermReport> run_generate(const PipelineConfig& cfg, const std::vector<std::string>& terms,
                                            const Tokenizer& tokenizer) {
    cfg.validate();
    PipelineConfig::require(cfg.corpus, "corpus");
    PipelineConfig::require(cfg.patterns, "patterns");
    PipelineConfig::require(cfg.store, "store");
    if (terms.empty()) throw ConfigError("no terms given");
    const DomainModel dm = obtain_domain_model(cfg, tokenizer);
    const TrigramModel lm = obtain_language_model(cfg, tokenizer);
    const PatternSet patterns = load_patterns(cfg.patterns, tokenizer);
    ExtractOptions extract_opts;
    extract_opts.n_sentences = cfg.n_sentences;
    IngestOptions ingest_opts;
    ingest_opts.max_pages = cfg.max_pages;

    std::vector<TermReport> reports;
    std::vector<EncyclopediaEntry> entries;
    for (const auto& term : terms) {
        TermReport r;
        r.term = term;
        auto ingested = ingest(std::filesystem::path(cfg.corpus), term, ingest_opts);
        r.pages = ingested.pages.size();
        r.dropped_missing_term = ingested.dropped_missing_term;
        r.record_errors = ingested.errors.size();
        auto candidates = extract_all(ingested.pages, term, patterns, tokenizer, extract_opts);
        r.candidates = candidates.size();
        r.organized = organize(term, candidates, dm, lm, tokenizer, {cfg.threshold, cfg.top_k});
        entries.push_back(r.organized.entry);
        reports.push_back(std::move(r));
    }
    EntryStore(cfg.store).save_all(entries);

    if (!cfg.audit.empty()) {
        std::ofstream out(cfg.audit, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write audit log '" + cfg.audit + "'");
        for (const auto& r : reports) {
            for (const auto& a : r.organized.audit) {
                nlohmann::json rec{{"term", r.term}, {"url", a.url}, {"rank", a.rank}, {"reason", a.reason}};
                if (!a.domain.empty()) {
                    rec["domain"] = a.domain;
                    rec["domain_weight"] = a.domain_weight;
                }
                out << rec.dump() << '\n';
            }
        }
    }
    return reports;
}

/// One row of the QA comparison: a knowledge resource evaluated without and with the random
/// fallback.
struct QaRow {
    std::string resource;
    QAResult without_random;
    QAResult with_random;
};

inline std::vector<QaRow> run_qa(const std::vector<Question>& questions, const std::vector<std::string>& stores,
                                 const Tokenizer& tokenizer, AnswerOptions options) {
    if (stores.empty()) throw ConfigError("at least one store is required");
    std::vector<KnowledgeBase> kbs(stores.size());
    for (std::size_t i = 0; i < stores.size(); ++i) {
        if (!std::filesystem::exists(stores[i])) throw ConfigError("store '" + stores[i] + "' does not exist");
        kbs[i].add_store(EntryStore(stores[i]));
    }
    std::vector<std::pair<std::string, KnowledgeBase>> resources;
    for (std::size_t i = 0; i < stores.size(); ++i) resources.emplace_back(std::filesystem::path(stores[i]).stem().string(), kbs[i]);
    if (stores.size() > 1) {
        std::vector<const KnowledgeBase*> parts;
        std::string name;
        for (std::size_t i = 0; i < kbs.size(); ++i) {
            parts.push_back(&kbs[i]);
            name += (i ? " + " : "") + resources[i].first;
        }
        resources.emplace_back(name, KnowledgeBase::merged(parts));
    }
    std::vector<QaRow> rows;
    for (const auto& [name, kb] : resources) {
        AnswerOptions plain = options;
        plain.fallback.random = false;
        AnswerOptions rnd = options;
        rnd.fallback.random = true;
        rows.push_back({name, evaluate(questions, kb, tokenizer, plain), evaluate(questions, kb, tokenizer, rnd)});
    }
    return rows;
}

inline std::string percent(std::optional<double> v) {
    if (!v) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
    return buf;
}

/// Coverage (C) and accuracy (A) in percent per resource, without and with random fallback.
inline std::string format_qa_table(const std::vector<QaRow>& rows) {
    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.resource.size());
    std::ostringstream out;
    auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
    auto cell = [](const std::string& s) { return std::string(7 - std::min<std::size_t>(7, s.size()), ' ') + s; };
    out << pad("") << "   w/o Random      w/ Random\n";
    out << pad("Resource") << cell("C") << cell("A") << "  " << cell("C") << cell("A") << '\n';
    for (const auto& r : rows) {
        out << pad(r.resource) << cell(percent(r.without_random.coverage())) << cell(percent(r.without_random.accuracy()))
            << "  " << cell(percent(r.with_random.coverage())) << cell(percent(r.with_random.accuracy())) << '\n';
    }
    return out.str();
}

inline nlohmann::json qa_rows_to_json(const std::vector<QaRow>& rows) {
    auto side = [](const QAResult& r) {
        nlohmann::json j{{"questions", r.outcomes.size()}, {"answered", r.answered}, {"correct", r.correct}, {"coverage", r.coverage()}};
        j["accuracy"] = r.accuracy() ? nlohmann::json(*r.accuracy()) : nlohmann::json(nullptr);
        return j;
    };
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) out.push_back({{"resource", r.resource}, {"without_random", side(r.without_random)}, {"with_random", side(r.with_random)}});
    return out;
}

}  // namespace encyclogen
