// encyclogen: build organized term descriptions from stored web pages and answer
// multiple-choice questions with them.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "encyclogen/pipeline.hpp"

namespace {

using namespace encyclogen;

struct Shared {
    PipelineConfig cfg;
    bool json = false;
    std::vector<std::string> terms;
    std::string terms_file;
    std::string out;
    std::string questions;
    std::vector<std::string> stores;
    std::vector<std::string> domains;
    std::string fallback = "none";
    std::string aggregation = "max";
    std::string outcomes;
};

void add_corpus(CLI::App* cmd, Shared& s) {
    cmd->add_option("--corpus", s.cfg.corpus, "Page corpus: JSON-lines file or directory of them")->envname("ENCYCLOGEN_CORPUS");
    cmd->add_option("--max-pages", s.cfg.max_pages,
                    "Pages kept per term, best ranks first (default 1000: search engines serve about the top 1000 results)")
        ->envname("ENCYCLOGEN_MAX_PAGES")
        ->capture_default_str();
}

void add_extract(CLI::App* cmd, Shared& s) {
    cmd->add_option("--patterns", s.cfg.patterns, "Definitional pattern file")->envname("ENCYCLOGEN_PATTERNS");
    cmd->add_option("--n-sentences", s.cfg.n_sentences,
                    "Sentences taken when no DD/P/UL block applies (default 3, set empirically)")
        ->envname("ENCYCLOGEN_N_SENTENCES")
        ->capture_default_str();
}

void add_models(CLI::App* cmd, Shared& s) {
    cmd->add_option("--lexicon", s.cfg.lexicon, "Domain lexicon (term<TAB>domain), trained on the fly")->envname("ENCYCLOGEN_LEXICON");
    cmd->add_option("--domain-model", s.cfg.domain_model, "Trained domain model (from train-domain)")->envname("ENCYCLOGEN_DOMAIN_MODEL");
    cmd->add_option("--reference", s.cfg.reference, "Reference encyclopedia (JSON lines: headword, body), trained on the fly")
        ->envname("ENCYCLOGEN_REFERENCE");
    cmd->add_option("--language-model", s.cfg.language_model, "Trained description model (from train-lm)")
        ->envname("ENCYCLOGEN_LANGUAGE_MODEL");
}

void print_json(const nlohmann::json& j) { std::cout << j.dump() << '\n'; }

int cmd_ingest(Shared& s, const Tokenizer&) {
    s.cfg.validate();
    PipelineConfig::require(s.cfg.corpus, "corpus");
    if (s.terms.empty()) throw ConfigError("missing --term");
    IngestOptions opts;
    opts.max_pages = s.cfg.max_pages;
    auto report = ingest(std::filesystem::path(s.cfg.corpus), s.terms.front(), opts);
    for (const auto& e : report.errors) std::cerr << e.file << ":" << e.line << ": " << e.message << '\n';
    if (!s.out.empty()) {
        std::ofstream out(s.out, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + s.out + "'");
        for (const auto& p : report.pages)
            out << nlohmann::json{{"url", p.url}, {"rank", p.rank}, {"html", p.normalized_text}}.dump() << '\n';
    }
    nlohmann::json summary{{"term", s.terms.front()},
                           {"pages", report.pages.size()},
                           {"dropped_missing_term", report.dropped_missing_term},
                           {"dropped_over_cap", report.dropped_over_cap},
                           {"record_errors", report.errors.size()}};
    if (s.json) {
        print_json(summary);
    } else {
        std::cout << "term: " << s.terms.front() << "\npages: " << report.pages.size()
                  << "\ndropped (term missing): " << report.dropped_missing_term
                  << "\ndropped (over cap): " << report.dropped_over_cap << "\nrecord errors: " << report.errors.size() << '\n';
    }
    return report.pages.empty() ? kExitEmpty : kExitOk;
}

int cmd_train_domain(Shared& s, const Tokenizer& tok) {
    s.cfg.validate();
    PipelineConfig::require(s.cfg.lexicon, "lexicon");
    PipelineConfig::require(s.out, "out");
    auto lexicon = load_lexicon(s.cfg.lexicon);
    auto model = train_domain_model(lexicon, tok);
    write_json_file(s.out, model.to_json());
    nlohmann::json summary{{"domains", model.domains().size()}, {"vocabulary", model.counts().size()}, {"tokens", model.total()}};
    if (s.json) print_json(summary);
    else std::cout << "domains: " << model.domains().size() << "\nvocabulary: " << model.counts().size() << "\ntokens: " << model.total() << '\n';
    return kExitOk;
}

int cmd_train_lm(Shared& s, const Tokenizer& tok) {
    s.cfg.validate();
    PipelineConfig::require(s.cfg.reference, "reference");
    PipelineConfig::require(s.out, "out");
    auto model = train_trigram(load_reference_corpus(s.cfg.reference), tok);
    write_json_file(s.out, model.to_json());
    nlohmann::json summary{{"vocabulary", model.vocabulary_size()}, {"tokens", model.token_count()}};
    if (s.json) print_json(summary);
    else std::cout << "vocabulary: " << model.vocabulary_size() << "\ntokens: " << model.token_count() << '\n';
    return kExitOk;
}

int cmd_extract(Shared& s, const Tokenizer& tok) {
    s.cfg.validate();
    PipelineConfig::require(s.cfg.corpus, "corpus");
    PipelineConfig::require(s.cfg.patterns, "patterns");
    if (s.terms.empty()) throw ConfigError("missing --term");
    IngestOptions io;
    io.max_pages = s.cfg.max_pages;
    auto pages = ingest(std::filesystem::path(s.cfg.corpus), s.terms.front(), io);
    ExtractOptions eo;
    eo.n_sentences = s.cfg.n_sentences;
    auto candidates = extract_all(pages.pages, s.terms.front(), load_patterns(s.cfg.patterns, tok), tok, eo);
    for (const auto& c : candidates) print_json(candidate_to_json(c));
    std::cerr << candidates.size() << " candidate(s) from " << pages.pages.size() << " page(s)\n";
    return candidates.empty() ? kExitEmpty : kExitOk;
}

std::vector<std::string> collect_terms(const Shared& s) {
    std::vector<std::string> terms = s.terms;
    if (!s.terms_file.empty()) {
        std::ifstream in(s.terms_file);
        if (!in) throw ConfigError("cannot read terms file '" + s.terms_file + "'");
        std::string line;
        while (std::getline(in, line)) {
            auto t = utf8::collapse_whitespace(line);
            if (!t.empty() && t[0] != '#') terms.push_back(t);
        }
    }
    return terms;
}

int cmd_generate(Shared& s, const Tokenizer& tok) {
    auto reports = run_generate(s.cfg, collect_terms(s), tok);
    bool any = false;
    for (const auto& r : reports) {
        any = any || r.organized.entry.status == EntryStatus::kOk;
        if (s.json) {
            print_json(r.summary());
        } else {
            std::cout << r.term << ": " << r.pages << " page(s), " << r.candidates << " candidate(s), "
                      << r.organized.entry.item_count() << " description(s) in " << r.organized.entry.groups.size()
                      << " domain(s)\n";
        }
    }
    return any ? kExitOk : kExitEmpty;
}

int cmd_stats(Shared& s, const Tokenizer&) {
    PipelineConfig::require(s.cfg.store, "store");
    if (!std::filesystem::exists(s.cfg.store)) throw ConfigError("store '" + s.cfg.store + "' does not exist");
    auto stats = StoreStats::of(EntryStore(s.cfg.store).load_all());
    if (s.json) print_json(stats.to_json());
    else std::cout << stats.to_text();
    return kExitOk;
}

int cmd_query(Shared& s, const Tokenizer&) {
    PipelineConfig::require(s.cfg.store, "store");
    if (s.terms.empty()) throw ConfigError("missing --term");
    auto entry = EntryStore(s.cfg.store).load(s.terms.front());
    if (!entry) {
        std::cerr << "not found: " << s.terms.front() << '\n';
        return kExitEmpty;
    }
    if (s.json) {
        print_json(entry_to_json(*entry));
    } else {
        std::cout << entry->term << '\n';
        if (entry->groups.empty()) std::cout << "  (no descriptions)\n";
        for (const auto& g : entry->groups) {
            std::cout << "[" << g.domain << "]\n";
            for (const auto& it : g.items) {
                char score[64];
                std::snprintf(score, sizeof score, "%.4f, weight %.3f", it.log_combined, it.domain_weight);
                std::cout << "  - " << it.text << "\n    (" << it.url << " #" << it.rank << ", " << score << ")\n";
            }
        }
    }
    return entry->status == EntryStatus::kOk ? kExitOk : kExitEmpty;
}

int cmd_qa(Shared& s, const Tokenizer& tok) {
    s.cfg.validate();
    PipelineConfig::require(s.questions, "questions");
    if (s.fallback != "none" && s.fallback != "random") throw ConfigError("--fallback must be none or random");
    if (s.aggregation != "max" && s.aggregation != "mean") throw ConfigError("--aggregation must be max or mean");
    auto questions = load_questions(s.questions);
    AnswerOptions opt;
    if (!s.domains.empty()) opt.domains = std::set<std::string>(s.domains.begin(), s.domains.end());
    opt.fallback.seed = s.cfg.seed;
    opt.aggregation = s.aggregation == "max" ? Aggregation::kMax : Aggregation::kMean;
    opt.okapi.k1 = s.cfg.k1;
    opt.okapi.b = s.cfg.b;
    auto rows = run_qa(questions, s.stores, tok, opt);
    if (!s.outcomes.empty()) {
        std::ofstream out(s.outcomes, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + s.outcomes + "'");
        const QaRow& last = rows.back();
        const QAResult& chosen = s.fallback == "random" ? last.with_random : last.without_random;
        for (const auto& o : chosen.outcomes)
            out << nlohmann::json{{"id", o.id}, {"answered", o.answered}, {"chosen", o.chosen}, {"correct", o.correct}, {"fallback", o.fallback}}.dump() << '\n';
    }
    if (s.json) print_json(qa_rows_to_json(rows));
    else std::cout << format_qa_table(rows);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"encyclogen: generate organized term descriptions from web pages and use them for question answering"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Configuration file (TOML); environment variables and flags override it");
    Shared s;
    app.add_option("--tokenizer", s.cfg.tokenizer, "Tokenizer: unicode-default or external:<command>")
        ->envname("ENCYCLOGEN_TOKENIZER")
        ->capture_default_str();
    app.add_flag("--json", s.json, "Emit machine-readable records");

    auto* ingest_cmd = app.add_subcommand("ingest", "Load, normalize and filter the pages for a term");
    add_corpus(ingest_cmd, s);
    ingest_cmd->add_option("--term", s.terms, "Query term")->required()->expected(1);
    ingest_cmd->add_option("--out", s.out, "Write normalized pages as JSON lines");

    auto* train_domain_cmd = app.add_subcommand("train-domain", "Train the domain model from a lexicon");
    train_domain_cmd->add_option("--lexicon", s.cfg.lexicon, "Domain lexicon (term<TAB>domain)")->envname("ENCYCLOGEN_LEXICON");
    train_domain_cmd->add_option("--out", s.out, "Model output file")->required();

    auto* train_lm_cmd = app.add_subcommand("train-lm", "Train the trigram description model from a reference encyclopedia");
    train_lm_cmd->add_option("--reference", s.cfg.reference, "Reference encyclopedia (JSON lines: headword, body)")
        ->envname("ENCYCLOGEN_REFERENCE");
    train_lm_cmd->add_option("--out", s.out, "Model output file")->required();

    auto* extract_cmd = app.add_subcommand("extract", "Print the candidate descriptions found for a term");
    add_corpus(extract_cmd, s);
    add_extract(extract_cmd, s);
    extract_cmd->add_option("--term", s.terms, "Query term")->required()->expected(1);

    auto* generate_cmd = app.add_subcommand("generate", "Ingest, extract, organize and store entries for terms");
    add_corpus(generate_cmd, s);
    add_extract(generate_cmd, s);
    add_models(generate_cmd, s);
    generate_cmd->add_option("--term", s.terms, "Term to generate (repeatable)");
    generate_cmd->add_option("--terms-file", s.terms_file, "File with one term per line");
    generate_cmd->add_option("--store", s.cfg.store, "Encyclopedia store to update")->envname("ENCYCLOGEN_STORE");
    generate_cmd->add_option("--threshold", s.cfg.threshold, "Minimum normalized domain weight kept (default 0.05)")
        ->envname("ENCYCLOGEN_THRESHOLD")
        ->capture_default_str();
    generate_cmd->add_option("--top-k", s.cfg.top_k, "Descriptions kept per domain (default 3)")
        ->envname("ENCYCLOGEN_TOP_K")
        ->capture_default_str();
    generate_cmd->add_option("--audit", s.cfg.audit, "Write dropped candidates and domains as JSON lines");

    auto* stats_cmd = app.add_subcommand("stats", "Rank histogram (groups of 50) and domain distribution of a store");
    stats_cmd->add_option("--store", s.cfg.store, "Encyclopedia store")->envname("ENCYCLOGEN_STORE");

    auto* query_cmd = app.add_subcommand("query", "Print the stored entry for a term");
    query_cmd->add_option("--store", s.cfg.store, "Encyclopedia store")->envname("ENCYCLOGEN_STORE");
    query_cmd->add_option("term", s.terms, "Term to look up")->required()->expected(1);

    auto* qa_cmd = app.add_subcommand("qa", "Answer multiple-choice questions and report coverage and accuracy");
    qa_cmd->add_option("--questions", s.questions, "Question file (JSON lines)")->required();
    qa_cmd->add_option("--store", s.stores, "Encyclopedia store (repeatable; the union is reported too)")->required();
    qa_cmd->add_option("--domains", s.domains, "Only use descriptions from these domains");
    qa_cmd->add_option("--fallback", s.fallback, "Per-question outcomes use this fallback: none or random")->capture_default_str();
    qa_cmd->add_option("--seed", s.cfg.seed, "Seed of the random fallback")->envname("ENCYCLOGEN_SEED")->capture_default_str();
    qa_cmd->add_option("--k1", s.cfg.k1, "Okapi term-frequency saturation")->capture_default_str();
    qa_cmd->add_option("--b", s.cfg.b, "Okapi length normalization")->capture_default_str();
    qa_cmd->add_option("--aggregation", s.aggregation, "Combine scores of several descriptions: max or mean")->capture_default_str();
    qa_cmd->add_option("--outcomes", s.outcomes, "Write per-question outcomes for the last resource as JSON lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        auto tokenizer = make_tokenizer(s.cfg.tokenizer);
        if (*ingest_cmd) return cmd_ingest(s, *tokenizer);
        if (*train_domain_cmd) return cmd_train_domain(s, *tokenizer);
        if (*train_lm_cmd) return cmd_train_lm(s, *tokenizer);
        if (*extract_cmd) return cmd_extract(s, *tokenizer);
        if (*generate_cmd) return cmd_generate(s, *tokenizer);
        if (*stats_cmd) return cmd_stats(s, *tokenizer);
        if (*query_cmd) return cmd_query(s, *tokenizer);
        if (*qa_cmd) return cmd_qa(s, *tokenizer);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitConfig;
}
