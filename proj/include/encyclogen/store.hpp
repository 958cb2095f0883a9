#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "encyclogen/error.hpp"
#include "encyclogen/organizer.hpp"
#include "encyclogen/utf8.hpp"

namespace encyclogen {

inline nlohmann::json entry_to_json(const EncyclopediaEntry& e) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : e.groups) {
        nlohmann::json items = nlohmann::json::array();
        for (const auto& it : g.items) {
            items.push_back({{"text", it.text},
                             {"log_combined", it.log_combined},
                             {"domain_weight", it.domain_weight},
                             {"url", it.url},
                             {"rank", it.rank},
                             {"rule", to_string(it.rule)},
                             {"trigger", to_string(it.trigger)}});
        }
        groups.push_back({{"domain", g.domain}, {"items", items}});
    }
    return {{"term", e.term}, {"status", e.status == EntryStatus::kOk ? "ok" : "empty"}, {"groups", groups}};
}

inline EncyclopediaEntry entry_from_json(const nlohmann::json& j) {
    try {
        EncyclopediaEntry e;
        e.term = j.at("term").get<std::string>();
        e.status = j.at("status") == "ok" ? EntryStatus::kOk : EntryStatus::kEmpty;
        for (const auto& g : j.at("groups")) {
            DomainGroup group{g.at("domain").get<std::string>(), {}};
            for (const auto& it : g.at("items")) {
                group.items.push_back({it.at("text").get<std::string>(), it.at("log_combined").get<double>(),
                                       it.at("domain_weight").get<double>(), it.at("url").get<std::string>(),
                                       it.at("rank").get<int>(), rule_from_string(it.at("rule").get<std::string>()),
                                       trigger_from_string(it.at("trigger").get<std::string>())});
            }
            e.groups.push_back(std::move(group));
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(std::string("malformed encyclopedia entry: ") + ex.what());
    }
}

/// Encyclopedia store: a JSON-lines file with one entry per term, kept sorted by term key.
/// Single writer; readers see either the old or the new file because saves replace it whole.
class EntryStore {
  public:
    explicit EntryStore(std::filesystem::path path) : path_(std::move(path)) {}

    const std::filesystem::path& path() const { return path_; }

    /// Every entry, keyed by folded term. A missing file is an empty store.
    std::map<std::string, EncyclopediaEntry> load_all() const {
        std::map<std::string, EncyclopediaEntry> out;
        std::error_code ec;
        if (!std::filesystem::exists(path_, ec)) return out;
        std::ifstream in(path_, std::ios::binary);
        if (!in) throw DataError("cannot read store '" + path_.string() + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (utf8::collapse_whitespace(line).empty()) continue;
            try {
                auto e = entry_from_json(nlohmann::json::parse(line));
                out[utf8::term_key(e.term)] = std::move(e);
            } catch (const nlohmann::json::exception& ex) {
                throw DataError(path_.string() + ":" + std::to_string(lineno) + ": " + ex.what());
            } catch (const DataError& ex) {
                throw DataError(path_.string() + ":" + std::to_string(lineno) + ": " + ex.what());
            }
        }
        return out;
    }

    /// Empty when the term has no entry; I/O and format problems throw.
    std::optional<EncyclopediaEntry> load(std::string_view term) const {
        auto all = load_all();
        auto it = all.find(utf8::term_key(term));
        if (it == all.end()) return std::nullopt;
        return it->second;
    }

    std::vector<std::string> terms() const {
        std::vector<std::string> out;
        for (const auto& [key, e] : load_all()) out.push_back(e.term);
        return out;
    }

    void save(const EncyclopediaEntry& entry) { save_all({entry}); }

    /// Inserts or replaces entries and rewrites the file.
    void save_all(const std::vector<EncyclopediaEntry>& entries) {
        auto all = load_all();
        for (const auto& e : entries) all[utf8::term_key(e.term)] = e;
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        auto tmp = path_;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write store '" + path_.string() + "'");
            for (const auto& [key, e] : all) out << entry_to_json(e).dump() << '\n';
            if (!out) throw DataError("write failed for store '" + path_.string() + "'");
        }
        std::filesystem::rename(tmp, path_);
    }

  private:
    std::filesystem::path path_;
};

inline void save_entry(const EncyclopediaEntry& entry, const std::filesystem::path& store) { EntryStore(store).save(entry); }

inline std::optional<EncyclopediaEntry> load_entry(std::string_view term, const std::filesystem::path& store) {
    return EntryStore(store).load(term);
}

}  // namespace encyclogen
