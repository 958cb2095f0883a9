#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "encyclogen/domain_model.hpp"
#include "encyclogen/error.hpp"
#include "encyclogen/extractor.hpp"
#include "encyclogen/trigram.hpp"

namespace encyclogen {

struct EntryItem {
    std::string text;
    double log_combined = 0.0;  // log P(c|d) + log P(d)
    double domain_weight = 0.0;
    std::string url;
    int rank = 1;
    Rule rule = Rule::kSentences;
    Trigger trigger = Trigger::kPattern;

    bool operator==(const EntryItem&) const = default;
};

struct DomainGroup {
    std::string domain;
    std::vector<EntryItem> items;  // log_combined descending

    bool operator==(const DomainGroup&) const = default;
};

enum class EntryStatus { kOk, kEmpty };

/// Organized descriptions of one term, grouped by domain.
struct EncyclopediaEntry {
    std::string term;
    EntryStatus status = EntryStatus::kEmpty;
    std::vector<DomainGroup> groups;

    std::size_t item_count() const {
        std::size_t n = 0;
        for (const auto& g : groups) n += g.items.size();
        return n;
    }

    bool operator==(const EncyclopediaEntry&) const = default;
};

/// Why a candidate, or one of its domains, did not make it into the entry.
struct AuditRecord {
    std::string url;
    int rank = 1;
    std::string reason;  // unscorable-domain | unscorable-description | below-threshold | beyond-top-k
    std::string domain;
    double domain_weight = 0.0;
};

struct OrganizeResult {
    EncyclopediaEntry entry;
    std::vector<AuditRecord> audit;
};

struct OrganizeOptions {
    double threshold = 0.05;
    std::size_t top_k = 3;
};

/// A candidate with both model scores already computed. `description_log` is empty when the
/// description model could not score it.
struct ScoredCandidate {
    Candidate candidate;
    DomainPosterior posterior;
    std::optional<double> description_log;
};

/// Total order on items of one domain: higher combined score first, then better source rank,
/// then URL and text.
inline bool item_before(const EntryItem& a, const EntryItem& b) {
    if (a.log_combined != b.log_combined) return a.log_combined > b.log_combined;
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.url != b.url) return a.url < b.url;
    return a.text < b.text;
}

/// Normalizes combined scores across domains for one candidate; zero where the domain score is zero.
inline std::vector<double> domain_weights(const std::vector<double>& log_combined) {
    double top = -std::numeric_limits<double>::infinity();
    for (double l : log_combined) top = std::max(top, l);
    std::vector<double> w(log_combined.size(), 0.0);
    if (!std::isfinite(top)) return w;
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::isfinite(log_combined[i]) ? std::exp(log_combined[i] - top) : 0.0;
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

inline OrganizeResult organize_scored(std::string_view term, const std::vector<std::string>& domains,
                                      const std::vector<ScoredCandidate>& scored, const OrganizeOptions& options = {}) {
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");
    if (options.top_k < 1) throw ConfigError("top-k must be at least 1");

    OrganizeResult result;
    result.entry.term = std::string(term);
    std::vector<std::vector<EntryItem>> per_domain(domains.size());

    for (const auto& s : scored) {
        const Candidate& c = s.candidate;
        if (!s.posterior.scorable) {
            result.audit.push_back({c.source_url, c.source_rank, "unscorable-domain", {}, 0.0});
            continue;
        }
        if (!s.description_log) {
            result.audit.push_back({c.source_url, c.source_rank, "unscorable-description", {}, 0.0});
            continue;
        }
        std::vector<double> combined(domains.size());
        for (std::size_t d = 0; d < domains.size(); ++d) {
            double p = s.posterior.scores.at(d);
            combined[d] = (p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity()) + *s.description_log;
        }
        auto weights = domain_weights(combined);
        for (std::size_t d = 0; d < domains.size(); ++d) {
            if (weights[d] <= 0.0) continue;
            if (weights[d] < options.threshold) {
                result.audit.push_back({c.source_url, c.source_rank, "below-threshold", domains[d], weights[d]});
                continue;
            }
            per_domain[d].push_back({c.text, combined[d], weights[d], c.source_url, c.source_rank, c.rule, c.trigger});
        }
    }

    for (std::size_t d = 0; d < domains.size(); ++d) {
        auto& items = per_domain[d];
        if (items.empty()) continue;
        std::sort(items.begin(), items.end(), item_before);
        for (std::size_t i = options.top_k; i < items.size(); ++i)
            result.audit.push_back({items[i].url, items[i].rank, "beyond-top-k", domains[d], items[i].domain_weight});
        if (items.size() > options.top_k) items.resize(options.top_k);
        result.entry.groups.push_back({domains[d], std::move(items)});
    }
    std::stable_sort(result.entry.groups.begin(), result.entry.groups.end(), [](const DomainGroup& a, const DomainGroup& b) {
        if (a.items.front().log_combined != b.items.front().log_combined)
            return a.items.front().log_combined > b.items.front().log_combined;
        return a.domain < b.domain;
    });
    result.entry.status = result.entry.groups.empty() ? EntryStatus::kEmpty : EntryStatus::kOk;
    return result;
}

inline ScoredCandidate score_candidate(const Candidate& c, const DomainModel& dm, const TrigramModel& lm,
                                       const Tokenizer& tokenizer) {
    ScoredCandidate s{c, domain_posterior(dm, c.text, tokenizer), std::nullopt};
    try {
        s.description_log = score_description(lm, c.text, c.term, tokenizer);
    } catch (const UnscorableError&) {
    }
    return s;
}

/// Scores candidates under both models, keeps (domain, description) pairs whose normalized
/// domain weight reaches the threshold and retains the best `top_k` descriptions per domain.
inline OrganizeResult organize(std::string_view term, const std::vector<Candidate>& candidates, const DomainModel& dm,
                               const TrigramModel& lm, const Tokenizer& tokenizer, const OrganizeOptions& options = {}) {
    require_fingerprint(dm.tokenizer_fingerprint(), tokenizer, "domain model");
    require_fingerprint(lm.tokenizer_fingerprint(), tokenizer, "description model");
    std::vector<ScoredCandidate> scored;
    scored.reserve(candidates.size());
    for (const auto& c : candidates) scored.push_back(score_candidate(c, dm, lm, tokenizer));
    return organize_scored(term, dm.domains(), scored, options);
}

}  // namespace encyclogen
