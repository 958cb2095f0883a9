#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "encyclogen/error.hpp"
#include "encyclogen/tokenizer.hpp"

namespace encyclogen {

struct Article {
    std::string headword;
    std::string body;
};

/// Reference encyclopedia used to train the description model.
struct ReferenceCorpus {
    std::vector<Article> articles;
};

/// Reads JSON-lines records with `headword` and `body` keys.
inline ReferenceCorpus load_reference_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read reference corpus '" + path.string() + "'");
    ReferenceCorpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (utf8::collapse_whitespace(line).empty()) continue;
        try {
            auto rec = nlohmann::json::parse(line);
            Article a{rec.at("headword").get<std::string>(), rec.at("body").get<std::string>()};
            if (utf8::collapse_whitespace(a.headword).empty() || utf8::collapse_whitespace(a.body).empty())
                throw DataError("empty headword or body");
            corpus.articles.push_back(std::move(a));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

/// Replaces every non-overlapping occurrence of `term` (as a token run) by `symbol`.
inline std::vector<std::string> mask_term(const std::vector<std::string>& tokens, const std::vector<std::string>& term,
                                          std::string_view symbol) {
    if (term.empty()) return tokens;
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size();) {
        if (i + term.size() <= tokens.size() &&
            std::equal(term.begin(), term.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            out.emplace_back(symbol);
            i += term.size();
        } else {
            out.push_back(tokens[i++]);
        }
    }
    return out;
}

enum class Smoothing { kWittenBell, kMaximumLikelihood };

/// Word-trigram model with the described term masked to one shared symbol. Conditionals are
/// Witten-Bell interpolated down to bigram, unigram and a uniform floor over the vocabulary
/// plus the unknown word; the maximum-likelihood estimates remain available for inspection.
class TrigramModel {
  public:
    using Id = std::uint32_t;
    static constexpr Id kBos = 0;
    static constexpr Id kEos = 1;
    static constexpr Id kUnk = 2;
    static constexpr Id kTerm = 3;
    static constexpr std::string_view kBosSymbol = "<s>";
    static constexpr std::string_view kEosSymbol = "</s>";
    static constexpr std::string_view kUnkSymbol = "<unk>";
    static constexpr std::string_view kTermSymbol = "<term>";
    static constexpr int kFormatVersion = 1;

    TrigramModel() {
        for (auto s : {kBosSymbol, kEosSymbol, kUnkSymbol, kTermSymbol}) intern(s);
    }

    /// Sentences of `text` as padded id streams (BOS BOS w... EOS), `term` masked. Unknown
    /// words map to UNK.
    std::vector<std::vector<Id>> encode(std::string_view text, std::string_view term, const Tokenizer& tokenizer) const {
        auto term_tokens = tokenizer.tokenize(term);
        std::vector<std::vector<Id>> out;
        for (const auto& sentence : tokenizer.segment(text)) {
            auto tokens = mask_term(tokenizer.tokenize(sentence), term_tokens, kTermSymbol);
            if (tokens.empty()) continue;
            std::vector<Id> ids{kBos, kBos};
            for (const auto& t : tokens) ids.push_back(id(t));
            ids.push_back(kEos);
            out.push_back(std::move(ids));
        }
        return out;
    }

    static TrigramModel train(const ReferenceCorpus& corpus, const Tokenizer& tokenizer) {
        if (corpus.articles.empty()) throw TrainingError("reference corpus is empty");
        TrigramModel m;
        m.fingerprint_ = tokenizer.fingerprint();
        for (const auto& article : corpus.articles) {
            auto head = tokenizer.tokenize(article.headword);
            for (const auto& sentence : tokenizer.segment(article.body)) {
                auto tokens = mask_term(tokenizer.tokenize(sentence), head, kTermSymbol);
                if (tokens.empty()) continue;
                std::vector<Id> ids{kBos, kBos};
                for (const auto& t : tokens) ids.push_back(m.intern(t));
                ids.push_back(kEos);
                for (std::size_t i = 2; i < ids.size(); ++i) m.add(ids[i - 2], ids[i - 1], ids[i], 1);
            }
        }
        if (m.tokens_ == 0) throw TrainingError("reference corpus yields no words");
        return m;
    }

    Smoothing smoothing() const { return smoothing_; }
    void set_smoothing(Smoothing s) { smoothing_ = s; }

    /// Page-quality factor; a constant that scales every description's probability.
    double quality_factor() const { return quality_; }
    void set_quality_factor(double q) {
        if (!(q > 0.0)) throw ConfigError("quality factor must be positive");
        quality_ = q;
    }

    const std::string& tokenizer_fingerprint() const { return fingerprint_; }

    std::size_t vocabulary_size() const { return words_.size(); }
    const std::string& word(Id i) const { return words_.at(i); }
    Id id(std::string_view w) const {
        auto it = ids_.find(std::string(w));
        return it == ids_.end() ? kUnk : it->second;
    }

    /// Every symbol a conditional distribution ranges over: the vocabulary without BOS, UNK included.
    std::vector<Id> outcomes() const {
        std::vector<Id> out;
        for (Id i = 0; i < words_.size(); ++i)
            if (i != kBos) out.push_back(i);
        return out;
    }

    std::uint64_t count(Id u, Id v, Id w) const { return lookup(trigrams_, key3(u, v, w)); }
    std::uint64_t count(Id v, Id w) const { return lookup(bigrams_, key2(v, w)); }
    std::uint64_t count(Id w) const { return w < unigrams_.size() ? unigrams_[w] : 0; }
    std::uint64_t token_count() const { return tokens_; }

    /// Relative-frequency estimate c(u,v,w) / c(u,v); zero for an unseen context.
    double ml_probability(Id u, Id v, Id w) const {
        auto ctx = trigram_contexts_.find(key2(u, v));
        if (ctx == trigram_contexts_.end()) return 0.0;
        return static_cast<double>(count(u, v, w)) / static_cast<double>(ctx->second.count);
    }

    double probability(Id u, Id v, Id w) const {
        if (smoothing_ == Smoothing::kMaximumLikelihood) return ml_probability(u, v, w);
        const double floor = 1.0 / static_cast<double>(words_.size() - 1);
        const double types0 = static_cast<double>(unigram_types_);
        const double n = static_cast<double>(tokens_);
        double p = (static_cast<double>(count(w)) + types0 * floor) / (n + types0);
        if (v < bigram_contexts_.size() && bigram_contexts_[v].count > 0) {
            const auto& ctx = bigram_contexts_[v];
            p = (static_cast<double>(count(v, w)) + static_cast<double>(ctx.types) * p) /
                static_cast<double>(ctx.count + ctx.types);
        }
        if (auto it = trigram_contexts_.find(key2(u, v)); it != trigram_contexts_.end()) {
            const auto& ctx = it->second;
            p = (static_cast<double>(count(u, v, w)) + static_cast<double>(ctx.types) * p) /
                static_cast<double>(ctx.count + ctx.types);
        }
        return p;
    }

    struct Score {
        double per_word_log = 0.0;  // total_log / words, plus log quality
        double total_log = 0.0;     // log probability of every sentence, end-of-sentence steps included
        std::size_t words = 0;
    };

    /// Log probability of a description with `term` masked, divided by its number of words.
    Score score(std::string_view text, std::string_view term, const Tokenizer& tokenizer) const {
        Score s;
        for (const auto& ids : encode(text, term, tokenizer)) {
            for (std::size_t i = 2; i < ids.size(); ++i) s.total_log += std::log(probability(ids[i - 2], ids[i - 1], ids[i]));
            s.words += ids.size() - 3;
        }
        if (s.words == 0) throw UnscorableError("description has no scorable words");
        s.per_word_log = s.total_log / static_cast<double>(s.words) + std::log(quality_);
        return s;
    }

    nlohmann::json to_json() const {
        std::vector<std::tuple<Id, Id, Id, std::uint64_t>> rows;
        rows.reserve(trigrams_.size());
        for (const auto& [k, c] : trigrams_)
            rows.emplace_back(static_cast<Id>(k >> 42), static_cast<Id>((k >> 21) & kMask), static_cast<Id>(k & kMask), c);
        std::sort(rows.begin(), rows.end());
        nlohmann::json trigrams = nlohmann::json::array();
        for (const auto& [u, v, w, c] : rows) trigrams.push_back({u, v, w, c});
        return {{"format", "encyclogen.trigram-model"},
                {"version", kFormatVersion},
                {"tokenizer", fingerprint_},
                {"smoothing", smoothing_ == Smoothing::kWittenBell ? "witten-bell" : "maximum-likelihood"},
                {"quality_factor", quality_},
                {"vocabulary", words_},
                {"trigrams", trigrams}};
    }

    static TrigramModel from_json(const nlohmann::json& j) {
        try {
            if (j.at("format") != "encyclogen.trigram-model") throw DataError("not a trigram model");
            if (j.at("version").get<int>() != kFormatVersion) throw DataError("unsupported trigram model version");
            TrigramModel m;
            auto vocab = j.at("vocabulary").get<std::vector<std::string>>();
            if (vocab.size() < 4 || vocab[kBos] != kBosSymbol || vocab[kEos] != kEosSymbol || vocab[kUnk] != kUnkSymbol ||
                vocab[kTerm] != kTermSymbol)
                throw DataError("trigram vocabulary lacks reserved symbols");
            for (std::size_t i = 4; i < vocab.size(); ++i) {
                if (m.ids_.count(vocab[i]) > 0) throw DataError("duplicate vocabulary word '" + vocab[i] + "'");
                m.intern(vocab[i]);
            }
            m.fingerprint_ = j.at("tokenizer").get<std::string>();
            m.smoothing_ = j.at("smoothing") == "maximum-likelihood" ? Smoothing::kMaximumLikelihood : Smoothing::kWittenBell;
            m.quality_ = j.at("quality_factor").get<double>();
            for (const auto& row : j.at("trigrams")) {
                auto u = row.at(0).get<Id>(), v = row.at(1).get<Id>(), w = row.at(2).get<Id>();
                if (u >= vocab.size() || v >= vocab.size() || w >= vocab.size() || w == kBos)
                    throw DataError("trigram id out of range");
                m.add(u, v, w, row.at(3).get<std::uint64_t>());
            }
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed trigram model: ") + e.what());
        }
    }

  private:
    struct Context {
        std::uint64_t count = 0;
        std::uint64_t types = 0;
    };
    static constexpr std::uint64_t kMask = (1ULL << 21) - 1;

    static std::uint64_t key2(Id a, Id b) { return (static_cast<std::uint64_t>(a) << 21) | b; }
    static std::uint64_t key3(Id a, Id b, Id c) {
        return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | c;
    }
    static std::uint64_t lookup(const std::unordered_map<std::uint64_t, std::uint64_t>& m, std::uint64_t k) {
        auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    }

    Id intern(std::string_view w) {
        auto [it, inserted] = ids_.emplace(std::string(w), static_cast<Id>(words_.size()));
        if (inserted) {
            if (words_.size() > kMask) throw TrainingError("vocabulary exceeds 2^21 words");
            words_.emplace_back(w);
        }
        return it->second;
    }

    void add(Id u, Id v, Id w, std::uint64_t c) {
        if (c == 0) return;
        if (unigrams_.size() < words_.size()) unigrams_.resize(words_.size(), 0);
        if (bigram_contexts_.size() < words_.size()) bigram_contexts_.resize(words_.size());
        auto& tri = trigrams_[key3(u, v, w)];
        auto& tctx = trigram_contexts_[key2(u, v)];
        if (tri == 0) ++tctx.types;
        tri += c;
        tctx.count += c;
        auto& bi = bigrams_[key2(v, w)];
        if (bi == 0) ++bigram_contexts_[v].types;
        bi += c;
        bigram_contexts_[v].count += c;
        if (unigrams_[w] == 0) ++unigram_types_;
        unigrams_[w] += c;
        tokens_ += c;
    }

    std::vector<std::string> words_;
    std::unordered_map<std::string, Id> ids_;
    std::unordered_map<std::uint64_t, std::uint64_t> trigrams_;
    std::unordered_map<std::uint64_t, Context> trigram_contexts_;
    std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;
    std::vector<Context> bigram_contexts_;
    std::vector<std::uint64_t> unigrams_;
    std::uint64_t unigram_types_ = 0;
    std::uint64_t tokens_ = 0;
    Smoothing smoothing_ = Smoothing::kWittenBell;
    double quality_ = 1.0;
    std::string fingerprint_;
};

inline TrigramModel train_trigram(const ReferenceCorpus& corpus, const Tokenizer& tokenizer) {
    return TrigramModel::train(corpus, tokenizer);
}

/// Per-word log probability of a candidate description.
inline double score_description(const TrigramModel& model, std::string_view text, std::string_view term,
                                const Tokenizer& tokenizer) {
    return model.score(text, term, tokenizer).per_word_log;
}

}  // namespace encyclogen
