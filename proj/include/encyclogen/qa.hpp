#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "encyclogen/error.hpp"
#include "encyclogen/store.hpp"
#include "encyclogen/tokenizer.hpp"

namespace encyclogen {

enum class QuestionType { kTermToDescription, kDescriptionToTerm };

/// A quadruple-choice question. Type 1 gives a term and asks for its description; type 2 gives a
/// description and asks for the term.
struct Question {
    std::string id;
    QuestionType qtype = QuestionType::kTermToDescription;
    std::string stem;
    std::array<std::string, 4> choices;
    int gold = 0;
};

inline Question question_from_json(const nlohmann::json& j) {
    try {
        Question q;
        q.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        const auto& t = j.at("qtype");
        if (t == "type1" || t == "TYPE1_TERM_TO_DESC" || t == 1) q.qtype = QuestionType::kTermToDescription;
        else if (t == "type2" || t == "TYPE2_DESC_TO_TERM" || t == 2) q.qtype = QuestionType::kDescriptionToTerm;
        else throw DataError("question '" + q.id + "': unknown qtype " + t.dump());
        q.stem = j.at("stem").get<std::string>();
        if (utf8::collapse_whitespace(q.stem).empty()) throw DataError("question '" + q.id + "': empty stem");
        auto choices = j.at("choices").get<std::vector<std::string>>();
        if (choices.size() != 4) throw DataError("question '" + q.id + "': expected exactly 4 choices");
        for (std::size_t i = 0; i < 4; ++i) q.choices[i] = choices[i];
        q.gold = j.at("gold").get<int>();
        if (q.gold < 0 || q.gold > 3) throw DataError("question '" + q.id + "': gold must be in 0..3");
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed question: ") + e.what());
    }
}

inline nlohmann::json question_to_json(const Question& q) {
    return {{"id", q.id},
            {"qtype", q.qtype == QuestionType::kTermToDescription ? "type1" : "type2"},
            {"stem", q.stem},
            {"choices", q.choices},
            {"gold", q.gold}};
}

inline std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read questions '" + path.string() + "'");
    std::vector<Question> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (utf8::collapse_whitespace(line).empty()) continue;
        try {
            out.push_back(question_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

struct OkapiParams {
    double k1 = 1.2;
    double b = 0.75;
    double idf_floor = 1e-6;  // keeps terms found in most documents slightly positive
};

/// Document frequencies and average length of a small document collection.
struct CollectionStats {
    std::size_t n_docs = 0;
    double avg_length = 0.0;
    std::map<std::string, std::size_t, std::less<>> df;

    static CollectionStats of(const std::vector<std::vector<std::string>>& docs) {
        CollectionStats s;
        s.n_docs = docs.size();
        std::size_t total = 0;
        for (const auto& d : docs) {
            total += d.size();
            for (const auto& t : std::set<std::string_view>(d.begin(), d.end())) ++s.df[std::string(t)];
        }
        s.avg_length = docs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs.size());
        return s;
    }

    std::size_t frequency(std::string_view t) const {
        auto it = df.find(t);
        return it == df.end() ? 0 : it->second;
    }
};

inline double okapi_idf(std::size_t df, std::size_t n_docs, const OkapiParams& p) {
    double raw = std::log((static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) / (static_cast<double>(df) + 0.5));
    return std::max(p.idf_floor, raw);
}

/// Okapi score of a document for a query: over distinct query words found in the document,
/// idf times saturated, length-normalized term frequency.
inline double okapi_score(const std::vector<std::string>& query, const std::vector<std::string>& doc,
                          const CollectionStats& stats, const OkapiParams& p = {}) {
    if (doc.empty()) return 0.0;
    std::map<std::string_view, std::size_t> tf;
    for (const auto& t : doc) ++tf[t];
    const double norm = stats.avg_length > 0.0 ? static_cast<double>(doc.size()) / stats.avg_length : 1.0;
    double score = 0.0;
    for (const auto& t : std::set<std::string_view>(query.begin(), query.end())) {
        auto it = tf.find(t);
        if (it == tf.end()) continue;
        const double f = static_cast<double>(it->second);
        score += okapi_idf(stats.frequency(t), stats.n_docs, p) * f * (p.k1 + 1.0) / (f + p.k1 * (1.0 - p.b + p.b * norm));
    }
    return score;
}

/// Similarity of `doc_text` to `query_text`, with idf and average length taken over `collection`.
inline double similarity(std::string_view query_text, std::string_view doc_text, const std::vector<std::string>& collection,
                         const Tokenizer& tokenizer, const OkapiParams& p = {}) {
    std::vector<std::vector<std::string>> docs;
    for (const auto& c : collection) docs.push_back(tokenizer.tokenize(c));
    return okapi_score(tokenizer.tokenize(query_text), tokenizer.tokenize(doc_text), CollectionStats::of(docs), p);
}

struct KbDescription {
    std::string domain;
    std::string text;
};

/// Term descriptions from one or more encyclopedia stores, merged by term.
class KnowledgeBase {
  public:
    void add(const EncyclopediaEntry& e) {
        auto& list = entries_[utf8::term_key(e.term)];
        for (const auto& g : e.groups)
            for (const auto& it : g.items) list.push_back({g.domain, it.text});
    }

    void add_store(const EntryStore& store) {
        for (const auto& [key, e] : store.load_all()) add(e);
    }

    /// Union of two knowledge bases: description lists are concatenated per term.
    static KnowledgeBase merged(const std::vector<const KnowledgeBase*>& parts) {
        KnowledgeBase out;
        for (const auto* kb : parts)
            for (const auto& [key, list] : kb->entries_) {
                auto& dst = out.entries_[key];
                dst.insert(dst.end(), list.begin(), list.end());
            }
        return out;
    }

    std::vector<std::string> lookup(std::string_view term, const std::optional<std::set<std::string>>& domains = std::nullopt) const {
        std::vector<std::string> out;
        auto it = entries_.find(utf8::term_key(term));
        if (it == entries_.end()) return out;
        for (const auto& d : it->second)
            if (!domains || domains->count(d.domain) > 0) out.push_back(d.text);
        return out;
    }

    std::size_t term_count() const { return entries_.size(); }

  private:
    std::map<std::string, std::vector<KbDescription>> entries_;
};

enum class Aggregation { kMax, kMean };

struct Fallback {
    bool random = false;
    std::uint64_t seed = 0;
};

struct AnswerOptions {
    std::optional<std::set<std::string>> domains;
    Fallback fallback;
    Aggregation aggregation = Aggregation::kMax;
    OkapiParams okapi;
};

struct Answer {
    std::optional<int> choice;  // empty: abstained
    bool fallback = false;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline int argmax_lowest(const std::array<double, 4>& scores) {
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) best = i;
    return best;
}

inline double aggregate(const std::vector<double>& xs, Aggregation a) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    if (a == Aggregation::kMax) return *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace detail

/// Uniform pick among the four choices, reproducible from (seed, question id).
inline int random_choice(std::uint64_t seed, std::string_view question_id) {
    std::mt19937_64 rng(seed ^ detail::fnv1a(question_id));
    return static_cast<int>(rng() % 4);
}

inline Answer answer(const Question& q, const KnowledgeBase& kb, const Tokenizer& tokenizer, const AnswerOptions& opt = {}) {
    if (q.gold < 0 || q.gold > 3) throw DataError("question '" + q.id + "': gold must be in 0..3");
    std::array<double, 4> scores{};
    bool covered = false;
    if (q.qtype == QuestionType::kTermToDescription) {
        auto descriptions = kb.lookup(q.stem, opt.domains);
        if (!descriptions.empty()) {
            covered = true;
            std::vector<std::vector<std::string>> docs;
            for (const auto& c : q.choices) docs.push_back(tokenizer.tokenize(c));
            auto stats = CollectionStats::of(docs);
            std::array<std::vector<double>, 4> per_choice;
            for (const auto& d : descriptions) {
                auto query = tokenizer.tokenize(d);
                for (std::size_t i = 0; i < 4; ++i) per_choice[i].push_back(okapi_score(query, docs[i], stats, opt.okapi));
            }
            for (std::size_t i = 0; i < 4; ++i) scores[i] = detail::aggregate(per_choice[i], opt.aggregation);
        }
    } else {
        std::array<std::vector<std::vector<std::string>>, 4> described;
        std::vector<std::vector<std::string>> docs(4);
        for (std::size_t i = 0; i < 4; ++i) {
            for (const auto& d : kb.lookup(q.choices[i], opt.domains)) {
                described[i].push_back(tokenizer.tokenize(d));
                docs[i].insert(docs[i].end(), described[i].back().begin(), described[i].back().end());
                covered = true;
            }
        }
        if (covered) {
            auto stats = CollectionStats::of(docs);
            auto query = tokenizer.tokenize(q.stem);
            for (std::size_t i = 0; i < 4; ++i) {
                std::vector<double> s;
                for (const auto& d : described[i]) s.push_back(okapi_score(query, d, stats, opt.okapi));
                scores[i] = detail::aggregate(s, opt.aggregation);
            }
        }
    }
    if (covered) return {detail::argmax_lowest(scores), false};
    if (opt.fallback.random) return {random_choice(opt.fallback.seed, q.id), true};
    return {std::nullopt, false};
}

struct QuestionOutcome {
    std::string id;
    bool answered = false;
    int chosen = -1;
    bool correct = false;
    bool fallback = false;
};

struct QAResult {
    std::vector<QuestionOutcome> outcomes;
    std::size_t answered = 0;
    std::size_t correct = 0;

    double coverage() const { return outcomes.empty() ? 0.0 : static_cast<double>(answered) / static_cast<double>(outcomes.size()); }
    std::optional<double> accuracy() const {
        if (answered == 0) return std::nullopt;
        return static_cast<double>(correct) / static_cast<double>(answered);
    }
};

inline QAResult evaluate(const std::vector<Question>& questions, const KnowledgeBase& kb, const Tokenizer& tokenizer,
                         const AnswerOptions& opt = {}) {
    if (questions.empty()) throw DataError("no questions to evaluate");
    QAResult r;
    for (const auto& q : questions) {
        Answer a = answer(q, kb, tokenizer, opt);
        QuestionOutcome o{q.id, a.choice.has_value(), a.choice.value_or(-1), a.choice == q.gold, a.fallback};
        r.answered += o.answered ? 1 : 0;
        r.correct += o.correct ? 1 : 0;
        r.outcomes.push_back(std::move(o));
    }
    return r;
}

}  // namespace encyclogen
