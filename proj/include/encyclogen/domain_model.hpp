#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "encyclogen/error.hpp"
#include "encyclogen/tokenizer.hpp"

namespace encyclogen {

/// The nineteen technical fields of the reference machine-translation lexicon.
inline constexpr std::array<std::string_view, 19> kTechnicalFields{
    "aeronautics", "biotechnology", "business", "chemistry", "computers", "construction", "defense",
    "ecology",     "electricity",   "energy",   "finance",   "law",       "mathematics",  "mechanics",
    "medicine",    "metals",        "oceanography", "plants", "trade"};

struct LexiconEntry {
    std::string term;
    std::string domain;
};

/// Domain-tagged lexicon. A term listed under several domains appears once per domain.
struct DomainLexicon {
    std::vector<std::string> domains;
    std::vector<LexiconEntry> entries;

    void validate() const {
        if (entries.empty()) throw TrainingError("lexicon has no entries");
        std::map<std::string_view, std::size_t> per_domain;
        for (const auto& d : domains) per_domain[d] = 0;
        if (per_domain.size() != domains.size()) throw DataError("lexicon lists a domain twice");
        for (const auto& e : entries) {
            auto it = per_domain.find(e.domain);
            if (it == per_domain.end()) throw DataError("lexicon entry '" + e.term + "' has unknown domain '" + e.domain + "'");
            ++it->second;
        }
        for (const auto& [d, n] : per_domain)
            if (n == 0) throw DataError("domain '" + std::string(d) + "' has no lexicon entries");
    }
};

/// Reads `term<TAB>domain` lines. Domains are the distinct domain names, sorted.
inline DomainLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read lexicon '" + path.string() + "'");
    DomainLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (utf8::collapse_whitespace(line).empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected term<TAB>domain");
        std::string term = utf8::collapse_whitespace(line.substr(0, tab));
        std::string domain = utf8::collapse_whitespace(line.substr(tab + 1));
        if (term.empty() || domain.empty())
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": empty term or domain");
        lex.entries.push_back({std::move(term), std::move(domain)});
    }
    for (const auto& e : lex.entries) lex.domains.push_back(e.domain);
    std::sort(lex.domains.begin(), lex.domains.end());
    lex.domains.erase(std::unique(lex.domains.begin(), lex.domains.end()), lex.domains.end());
    lex.validate();
    return lex;
}

/// Per-domain scores for one description; all zero and `scorable == false` when none of its
/// words is known to the model.
struct DomainPosterior {
    std::vector<double> scores;  // indexed like DomainModel::domains()
    bool scorable = false;
};

/// Word statistics per domain and overall, estimated as relative frequencies over the
/// tokenized lexicon entries. Scores a text by summing, over its known words, the word's
/// in-domain probability times its in-text relative frequency over its overall probability.
class DomainModel {
  public:
    struct WordCounts {
        std::vector<std::uint64_t> per_domain;
        std::uint64_t total = 0;
    };

    static constexpr int kFormatVersion = 1;

    static DomainModel train(const DomainLexicon& lexicon, const Tokenizer& tokenizer) {
        lexicon.validate();
        DomainModel m;
        m.domains_ = lexicon.domains;
        m.fingerprint_ = tokenizer.fingerprint();
        m.domain_totals_.assign(m.domains_.size(), 0);
        std::map<std::string_view, std::size_t> index;
        for (std::size_t i = 0; i < m.domains_.size(); ++i) index[m.domains_[i]] = i;
        for (const auto& e : lexicon.entries) {
            std::size_t c = index.at(e.domain);
            for (auto& tok : tokenizer.tokenize(e.term)) {
                auto& w = m.counts_[std::move(tok)];
                if (w.per_domain.empty()) w.per_domain.assign(m.domains_.size(), 0);
                ++w.per_domain[c];
                ++w.total;
                ++m.domain_totals_[c];
                ++m.total_;
            }
        }
        for (std::size_t c = 0; c < m.domains_.size(); ++c)
            if (m.domain_totals_[c] == 0) throw TrainingError("domain '" + m.domains_[c] + "' yields no words");
        return m;
    }

    const std::vector<std::string>& domains() const { return domains_; }
    const std::map<std::string, WordCounts, std::less<>>& counts() const { return counts_; }
    const std::string& tokenizer_fingerprint() const { return fingerprint_; }
    double prior_constant() const { return prior_; }
    void set_prior_constant(double p) {
        if (!(p > 0.0)) throw ConfigError("domain prior constant must be positive");
        prior_ = p;
    }

    std::uint64_t count(std::string_view word, std::size_t domain) const {
        auto it = counts_.find(word);
        return it == counts_.end() ? 0 : it->second.per_domain.at(domain);
    }
    std::uint64_t count(std::string_view word) const {
        auto it = counts_.find(word);
        return it == counts_.end() ? 0 : it->second.total;
    }
    std::uint64_t total(std::size_t domain) const { return domain_totals_.at(domain); }
    std::uint64_t total() const { return total_; }

    double p_word_given_domain(std::string_view word, std::size_t domain) const {
        return static_cast<double>(count(word, domain)) / static_cast<double>(total(domain));
    }
    double p_word(std::string_view word) const {
        return static_cast<double>(count(word)) / static_cast<double>(total_);
    }

    std::size_t domain_index(std::string_view name) const {
        auto it = std::find(domains_.begin(), domains_.end(), name);
        if (it == domains_.end()) throw DataError("unknown domain '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - domains_.begin());
    }

    DomainPosterior posterior(const std::vector<std::string>& tokens) const {
        DomainPosterior out;
        out.scores.assign(domains_.size(), 0.0);
        if (tokens.empty()) return out;
        std::map<std::string_view, std::uint64_t> tf;
        for (const auto& t : tokens) ++tf[t];
        const double n = static_cast<double>(tokens.size());
        for (const auto& [word, freq] : tf) {
            auto it = counts_.find(word);
            if (it == counts_.end()) continue;
            out.scorable = true;
            const double p_word = static_cast<double>(it->second.total) / static_cast<double>(total_);
            const double p_in_text = static_cast<double>(freq) / n;
            for (std::size_t c = 0; c < domains_.size(); ++c) {
                const double p_in_domain =
                    static_cast<double>(it->second.per_domain[c]) / static_cast<double>(domain_totals_[c]);
                out.scores[c] += p_in_domain * p_in_text / p_word;
            }
        }
        for (double& s : out.scores) s *= prior_;
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json counts = nlohmann::json::object();
        for (const auto& [word, w] : counts_) counts[word] = w.per_domain;
        return {{"format", "encyclogen.domain-model"},
                {"version", kFormatVersion},
                {"tokenizer", fingerprint_},
                {"prior_constant", prior_},
                {"domains", domains_},
                {"domain_totals", domain_totals_},
                {"total", total_},
                {"counts", counts}};
    }

    static DomainModel from_json(const nlohmann::json& j) {
        try {
            if (j.at("format") != "encyclogen.domain-model") throw DataError("not a domain model");
            if (j.at("version").get<int>() != kFormatVersion) throw DataError("unsupported domain model version");
            DomainModel m;
            m.fingerprint_ = j.at("tokenizer").get<std::string>();
            m.prior_ = j.at("prior_constant").get<double>();
            m.domains_ = j.at("domains").get<std::vector<std::string>>();
            m.domain_totals_ = j.at("domain_totals").get<std::vector<std::uint64_t>>();
            m.total_ = j.at("total").get<std::uint64_t>();
            std::vector<std::uint64_t> check(m.domains_.size(), 0);
            for (const auto& [word, arr] : j.at("counts").items()) {
                WordCounts w{arr.get<std::vector<std::uint64_t>>(), 0};
                if (w.per_domain.size() != m.domains_.size()) throw DataError("count row width mismatch for '" + word + "'");
                for (std::size_t c = 0; c < w.per_domain.size(); ++c) {
                    w.total += w.per_domain[c];
                    check[c] += w.per_domain[c];
                }
                m.counts_.emplace(word, std::move(w));
            }
            if (check != m.domain_totals_) throw DataError("domain totals do not match counts");
            std::uint64_t sum = 0;
            for (auto t : check) sum += t;
            if (sum != m.total_) throw DataError("global total does not match counts");
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed domain model: ") + e.what());
        }
    }

  private:
    std::vector<std::string> domains_;
    std::map<std::string, WordCounts, std::less<>> counts_;
    std::vector<std::uint64_t> domain_totals_;
    std::uint64_t total_ = 0;
    double prior_ = 1.0;
    std::string fingerprint_;
};

inline DomainModel train_domain_model(const DomainLexicon& lexicon, const Tokenizer& tokenizer) {
    return DomainModel::train(lexicon, tokenizer);
}

inline DomainPosterior domain_posterior(const DomainModel& model, std::string_view text, const Tokenizer& tokenizer) {
    return model.posterior(tokenizer.tokenize(text));
}

}  // namespace encyclogen
