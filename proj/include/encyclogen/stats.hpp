#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "encyclogen/organizer.hpp"

namespace encyclogen {

/// Summary of a store: how many source pages fall in each block of result ranks, and how many
/// retained descriptions each domain received.
struct StoreStats {
    static constexpr int kBucketWidth = 50;
    static constexpr std::size_t kMinBuckets = 20;  // ranks 1..1000

    std::size_t terms = 0;
    std::size_t terms_with_descriptions = 0;
    std::size_t descriptions = 0;
    std::vector<std::size_t> rank_buckets;  // bucket i counts ranks 50i+1 .. 50(i+1)
    std::vector<std::pair<std::string, std::size_t>> domains;  // count descending, then name

    static StoreStats of(const std::map<std::string, EncyclopediaEntry>& entries) {
        StoreStats s;
        std::map<std::string, std::size_t> per_domain;
        std::set<std::tuple<std::string, std::string, int>> pages;  // (term, url, rank)
        for (const auto& [key, e] : entries) {
            ++s.terms;
            if (e.item_count() > 0) ++s.terms_with_descriptions;
            for (const auto& g : e.groups) {
                per_domain[g.domain] += g.items.size();
                s.descriptions += g.items.size();
                for (const auto& it : g.items) pages.emplace(key, it.url, it.rank);
            }
        }
        int max_rank = 0;
        for (const auto& p : pages) max_rank = std::max(max_rank, std::get<2>(p));
        std::size_t n = std::max<std::size_t>(kMinBuckets, static_cast<std::size_t>((max_rank + kBucketWidth - 1) / kBucketWidth));
        s.rank_buckets.assign(n, 0);
        for (const auto& p : pages) ++s.rank_buckets[static_cast<std::size_t>((std::get<2>(p) - 1) / kBucketWidth)];
        s.domains.assign(per_domain.begin(), per_domain.end());
        std::stable_sort(s.domains.begin(), s.domains.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json buckets = nlohmann::json::array();
        for (std::size_t i = 0; i < rank_buckets.size(); ++i) {
            buckets.push_back({{"first_rank", i * kBucketWidth + 1}, {"last_rank", (i + 1) * kBucketWidth}, {"pages", rank_buckets[i]}});
        }
        nlohmann::json doms = nlohmann::json::array();
        for (const auto& [d, n] : domains) doms.push_back({{"domain", d}, {"descriptions", n}});
        return {{"terms", terms},
                {"terms_with_descriptions", terms_with_descriptions},
                {"descriptions", descriptions},
                {"rank_histogram", buckets},
                {"domain_distribution", doms}};
    }

    std::string to_text() const {
        std::ostringstream out;
        out << "terms: " << terms << " (with descriptions: " << terms_with_descriptions << ")\n";
        char per_term[32];
        std::snprintf(per_term, sizeof per_term, "%.2f", terms_with_descriptions ? double(descriptions) / double(terms_with_descriptions) : 0.0);
        out << "descriptions: " << descriptions << " (" << per_term << " per described term)\n";
        out << "source pages by rank (groups of " << kBucketWidth << "):\n";
        for (std::size_t i = 0; i < rank_buckets.size(); ++i) {
            char line[64];
            std::snprintf(line, sizeof line, "  %4zu-%-4zu %6zu\n", i * kBucketWidth + 1, (i + 1) * kBucketWidth, rank_buckets[i]);
            out << line;
        }
        out << "descriptions by domain:\n";
        for (const auto& [d, n] : domains) out << "  " << d << " (" << n << ")\n";
        return out.str();
    }
};

}  // namespace encyclogen
