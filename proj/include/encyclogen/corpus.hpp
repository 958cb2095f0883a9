#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "encyclogen/error.hpp"
#include "encyclogen/html.hpp"
#include "encyclogen/utf8.hpp"

namespace encyclogen {

/// One retrieved web page.
struct Page {
    std::string url;
    int rank = 1;  // 1-based result position
    std::string raw_html;
    std::string normalized_text;

    bool operator==(const Page&) const = default;
};

struct RecordError {
    std::string file;
    std::size_t line = 0;
    std::string message;
};

struct SearchResult {
    std::vector<Page> pages;  // ordered by rank
    std::vector<RecordError> errors;
};

/// Source of pages for a query term. Implementations must not expand the query; pages that
/// lack the term are rejected by ingest() regardless.
class SearchClient {
  public:
    virtual ~SearchClient() = default;
    virtual SearchResult search(std::string_view term, std::size_t max_results) const = 0;
};

namespace detail {

inline void read_corpus_file(const std::filesystem::path& path, SearchResult& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read page corpus '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (utf8::collapse_whitespace(line).empty()) continue;
        try {
            auto rec = nlohmann::json::parse(line);
            if (!rec.is_object()) throw DataError("record is not an object");
            if (!rec.contains("url") || !rec["url"].is_string()) throw DataError("missing string field 'url'");
            if (!rec.contains("rank") || !rec["rank"].is_number_integer()) throw DataError("missing integer field 'rank'");
            if (!rec.contains("html") || !rec["html"].is_string()) throw DataError("missing string field 'html'");
            auto rank = rec["rank"].get<long long>();
            if (rank < 1 || rank > 1'000'000'000) throw DataError("rank must be a positive integer");
            out.pages.push_back(Page{rec["url"].get<std::string>(), static_cast<int>(rank), rec["html"].get<std::string>(), {}});
        } catch (const nlohmann::json::exception& e) {
            out.errors.push_back({path.string(), lineno, e.what()});
        } catch (const DataError& e) {
            out.errors.push_back({path.string(), lineno, e.what()});
        }
    }
}

}  // namespace detail

/// Reads a page corpus: a JSON-lines file with `url`, `rank` and `html` keys per record, or a
/// directory of such files (`*.jsonl`, read in file-name order). Malformed records are reported
/// with their line number and skipped.
inline SearchResult read_page_corpus(const std::filesystem::path& source) {
    SearchResult out;
    std::error_code ec;
    if (std::filesystem::is_directory(source, ec)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(source)) {
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) detail::read_corpus_file(f, out);
    } else if (std::filesystem::exists(source, ec)) {
        detail::read_corpus_file(source, out);
    } else {
        throw DataError("page corpus '" + source.string() + "' does not exist");
    }
    std::stable_sort(out.pages.begin(), out.pages.end(), [](const Page& a, const Page& b) {
        return a.rank != b.rank ? a.rank < b.rank : a.url < b.url;
    });
    return out;
}

/// Offline search client backed by a stored page corpus.
class FileSearchClient final : public SearchClient {
  public:
    explicit FileSearchClient(std::filesystem::path source) : source_(std::move(source)) {}

    SearchResult search(std::string_view /*term*/, std::size_t /*max_results*/) const override {
        return read_page_corpus(source_);
    }

  private:
    std::filesystem::path source_;
};

/// Standardizes a page's format for extraction.
inline Page normalize(Page page, const std::set<std::string>& discardable_tags = html::default_discardable_tags()) {
    if (page.raw_html.empty()) throw DataError("page '" + page.url + "' has no content");
    page.normalized_text = html::normalize(page.raw_html, discardable_tags);
    return page;
}

/// Case-folded substring match of `term` against the tag-stripped page text.
inline bool contains_term(const Page& page, std::string_view term) {
    std::string needle = utf8::term_key(term);
    if (needle.empty()) return false;
    const std::string& source = page.normalized_text.empty() ? page.raw_html : page.normalized_text;
    return utf8::fold_case(html::strip_tags(source)).find(needle) != std::string::npos;
}

struct IngestOptions {
    std::size_t max_pages = 1000;
    std::set<std::string> discardable_tags = html::default_discardable_tags();
};

struct IngestReport {
    std::vector<Page> pages;  // normalized, rank ascending
    std::size_t dropped_missing_term = 0;
    std::size_t dropped_over_cap = 0;
    std::vector<RecordError> errors;
};

inline IngestReport ingest(const SearchClient& client, std::string_view term, const IngestOptions& options = {}) {
    if (utf8::term_key(term).empty()) throw ConfigError("ingest: empty term");
    SearchResult found = client.search(term, options.max_pages);
    IngestReport report;
    report.errors = std::move(found.errors);
    std::stable_sort(found.pages.begin(), found.pages.end(), [](const Page& a, const Page& b) {
        return a.rank != b.rank ? a.rank < b.rank : a.url < b.url;
    });
    for (auto& page : found.pages) {
        Page normalized;
        try {
            normalized = normalize(std::move(page), options.discardable_tags);
        } catch (const DataError& e) {
            report.errors.push_back({{}, 0, e.what()});
            continue;
        }
        if (!contains_term(normalized, term)) {
            ++report.dropped_missing_term;
            continue;
        }
        if (report.pages.size() >= options.max_pages) {
            ++report.dropped_over_cap;
            continue;
        }
        report.pages.push_back(std::move(normalized));
    }
    return report;
}

inline IngestReport ingest(const std::filesystem::path& source, std::string_view term, const IngestOptions& options = {}) {
    return ingest(FileSearchClient(source), term, options);
}

}  // namespace encyclogen
