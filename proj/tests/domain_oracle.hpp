#pragma once

// Direct evaluation of the domain score from raw lexicon entries, independent of DomainModel's
// count tables: token lists are rebuilt per call and frequencies come from std::count.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "encyclogen/domain_model.hpp"

namespace encyclogen::testutil {

inline std::vector<double> oracle_domain_scores(const DomainLexicon& lex, const std::string& text, const Tokenizer& tok,
                                                double prior = 1.0) {
    std::vector<std::vector<std::string>> by_domain(lex.domains.size());
    std::vector<std::string> all;
    for (const auto& e : lex.entries) {
        auto idx = static_cast<std::size_t>(std::find(lex.domains.begin(), lex.domains.end(), e.domain) - lex.domains.begin());
        for (const auto& t : tok.tokenize(e.term)) {
            by_domain[idx].push_back(t);
            all.push_back(t);
        }
    }
    auto d = tok.tokenize(text);
    std::vector<double> out(lex.domains.size(), 0.0);
    std::set<std::string> distinct(d.begin(), d.end());
    for (std::size_t c = 0; c < lex.domains.size(); ++c) {
        double sum = 0.0;
        for (const auto& t : distinct) {
            double p_t = double(std::count(all.begin(), all.end(), t)) / double(all.size());
            if (p_t == 0.0) continue;
            double p_tc = double(std::count(by_domain[c].begin(), by_domain[c].end(), t)) / double(by_domain[c].size());
            double p_td = double(std::count(d.begin(), d.end(), t)) / double(d.size());
            sum += p_tc * p_td / p_t;
        }
        out[c] = prior * sum;
    }
    return out;
}

/// Random lexicon with up to `max_domains` domains and at most `max_tokens` tokens in total.
inline DomainLexicon random_lexicon(std::mt19937& rng, std::size_t max_domains, std::size_t max_tokens,
                                    const std::vector<std::string>& pool) {
    DomainLexicon lex;
    std::size_t nd = std::uniform_int_distribution<std::size_t>(1, max_domains)(rng);
    for (std::size_t i = 0; i < nd; ++i) lex.domains.push_back("dom" + std::to_string(i));
    std::size_t budget = std::uniform_int_distribution<std::size_t>(nd, max_tokens)(rng);
    std::size_t used = 0;
    for (std::size_t i = 0; i < nd; ++i) {
        lex.entries.push_back({pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)], lex.domains[i]});
        ++used;
    }
    while (used < budget) {
        std::size_t len = std::min<std::size_t>(budget - used, std::uniform_int_distribution<std::size_t>(1, 3)(rng));
        std::string term;
        for (std::size_t k = 0; k < len; ++k) term += (k ? " " : "") + pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        lex.entries.push_back({term, lex.domains[std::uniform_int_distribution<std::size_t>(0, nd - 1)(rng)]});
        used += len;
    }
    return lex;
}

}  // namespace encyclogen::testutil
