#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "encyclogen/corpus.hpp"
#include "encyclogen/error.hpp"
#include "encyclogen/html.hpp"
#include "encyclogen/tokenizer.hpp"

namespace encyclogen {

inline constexpr std::string_view kTermPlaceholder = "TERM";

/// A definitional phrase with one placeholder for the term, stored as the folded tokens that
/// must precede and follow the term.
struct Pattern {
    std::vector<std::string> before;
    std::vector<std::string> after;
    std::string source;
};

struct PatternSet {
    std::string language = "en";
    std::vector<Pattern> patterns;
};

/// Parses the pattern-file format: one pattern per line, space-separated tokens, the literal
/// `TERM` exactly once per line. Lines starting with '#' are comments; a `# language: xx`
/// comment sets the language tag.
inline PatternSet parse_patterns(std::string_view content, const Tokenizer& tokenizer) {
    PatternSet set;
    std::istringstream in{std::string(content)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = utf8::collapse_whitespace(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            constexpr std::string_view kLang = "# language:";
            if (trimmed.rfind(kLang, 0) == 0) set.language = utf8::collapse_whitespace(trimmed.substr(kLang.size()));
            continue;
        }
        Pattern p;
        p.source = trimmed;
        int placeholders = 0;
        std::istringstream words(trimmed);
        std::string word;
        while (words >> word) {
            if (word == kTermPlaceholder) {
                ++placeholders;
                continue;
            }
            auto& side = placeholders == 0 ? p.before : p.after;
            for (auto& tok : tokenizer.tokenize(word)) side.push_back(std::move(tok));
        }
        if (placeholders != 1)
            throw DataError("pattern line " + std::to_string(lineno) + ": expected exactly one TERM placeholder");
        if (p.before.empty() && p.after.empty())
            throw DataError("pattern line " + std::to_string(lineno) + ": pattern has no tokens besides TERM");
        set.patterns.push_back(std::move(p));
    }
    if (set.patterns.empty()) throw DataError("pattern set is empty");
    return set;
}

inline PatternSet load_patterns(const std::filesystem::path& path, const Tokenizer& tokenizer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read pattern file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_patterns(buf.str(), tokenizer);
}

/// Positions where `needle` occurs as a contiguous run of `haystack`.
inline std::vector<std::size_t> find_token_runs(const std::vector<std::string>& haystack,
                                                const std::vector<std::string>& needle) {
    std::vector<std::size_t> hits;
    if (needle.empty() || needle.size() > haystack.size()) return hits;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i))) hits.push_back(i);
    }
    return hits;
}

/// True when some pattern matches `sentence` with the placeholder bound to `term`.
inline bool matches_pattern(const std::vector<std::string>& sentence, const std::vector<std::string>& term,
                            const PatternSet& patterns) {
    for (std::size_t at : find_token_runs(sentence, term)) {
        for (const auto& p : patterns.patterns) {
            if (p.before.size() > at) continue;
            std::size_t tail = at + term.size();
            if (tail + p.after.size() > sentence.size()) continue;
            if (std::equal(p.before.begin(), p.before.end(), sentence.begin() + static_cast<std::ptrdiff_t>(at - p.before.size())) &&
                std::equal(p.after.begin(), p.after.end(), sentence.begin() + static_cast<std::ptrdiff_t>(tail)))
                return true;
        }
    }
    return false;
}

enum class Rule { kDdAfterDt, kParagraph, kItemization, kSentences };
enum class Trigger { kPattern, kHeading, kAnchor };

inline std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::kDdAfterDt: return "DD_AFTER_DT";
        case Rule::kParagraph: return "PARAGRAPH";
        case Rule::kItemization: return "ITEMIZATION";
        case Rule::kSentences: return "N_SENTENCES";
    }
    return "?";
}

inline std::string_view to_string(Trigger t) {
    switch (t) {
        case Trigger::kPattern: return "PATTERN";
        case Trigger::kHeading: return "HEADING";
        case Trigger::kAnchor: return "ANCHOR";
    }
    return "?";
}

inline Rule rule_from_string(std::string_view s) {
    if (s == "DD_AFTER_DT") return Rule::kDdAfterDt;
    if (s == "PARAGRAPH") return Rule::kParagraph;
    if (s == "ITEMIZATION") return Rule::kItemization;
    if (s == "N_SENTENCES") return Rule::kSentences;
    throw DataError("unknown extraction rule '" + std::string(s) + "'");
}

inline Trigger trigger_from_string(std::string_view s) {
    if (s == "PATTERN") return Trigger::kPattern;
    if (s == "HEADING") return Trigger::kHeading;
    if (s == "ANCHOR") return Trigger::kAnchor;
    throw DataError("unknown extraction trigger '" + std::string(s) + "'");
}

/// An extracted fragment with its provenance.
struct Candidate {
    std::string term;
    std::string text;
    std::string source_url;
    int source_rank = 1;
    Rule rule = Rule::kSentences;
    Trigger trigger = Trigger::kPattern;

    bool operator==(const Candidate&) const = default;
};

/// Where a page probably describes the term. `node` is the matched sentence's enclosing element
/// for pattern hits and the heading element itself otherwise; [begin, end) is the matched
/// sentence or heading in the page's tag-stripped text.
struct Region {
    Trigger trigger = Trigger::kPattern;
    int node = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Region&) const = default;
};

struct ExtractOptions {
    std::size_t n_sentences = 3;
    std::set<std::string> heading_tags{"dt", "b", "h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9", "a"};
};

inline std::vector<Region> find_regions(const html::Document& doc, std::string_view term, const PatternSet& patterns,
                                        const Tokenizer& tokenizer, const ExtractOptions& options = {}) {
    std::vector<Region> regions;
    const auto term_tokens = tokenizer.tokenize(term);
    if (term_tokens.empty()) return regions;
    const std::string& text = doc.text();

    for (Span s : doc.sentences()) {
        auto tokens = tokenizer.tokenize(std::string_view(text).substr(s.begin, s.end - s.begin));
        if (!matches_pattern(tokens, term_tokens, patterns)) continue;
        int node = doc.element_at(s.begin);
        while (node > 0 && doc.node(node).end < s.end) node = doc.node(node).parent;
        regions.push_back({Trigger::kPattern, node, s.begin, s.end});
    }
    const auto& nodes = doc.nodes();
    for (int id = 1; id < static_cast<int>(nodes.size()); ++id) {
        const auto& n = nodes[static_cast<std::size_t>(id)];
        if (n.is_text() || options.heading_tags.count(n.tag) == 0) continue;
        if (find_token_runs(tokenizer.tokenize(doc.node_text(id)), term_tokens).empty()) continue;
        regions.push_back({n.tag == "a" ? Trigger::kAnchor : Trigger::kHeading, id, n.begin, n.end});
    }
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) { return a.begin < b.begin; });
    return regions;
}

inline std::vector<Region> find_regions(const Page& page, std::string_view term, const PatternSet& patterns,
                                        const Tokenizer& tokenizer, const ExtractOptions& options = {}) {
    return find_regions(html::Document::parse(page.normalized_text), term, patterns, tokenizer, options);
}

/// Picks the fragment for a region by the first applicable rule: the DD after an enclosing DT,
/// then the enclosing (or, for headings, the following) paragraph, then itemization, then
/// `n_sentences` sentences starting at the region.
inline Candidate extract_fragment(const html::Document& doc, const Page& page, std::string_view term,
                                  const Region& region, std::size_t n_sentences = 3) {
    Candidate c{std::string(term), {}, page.url, page.rank, Rule::kSentences, region.trigger};
    auto accept = [&](int node, Rule rule) {
        if (node < 0) return false;
        std::string t = doc.node_text(node);
        if (t.empty()) return false;
        c.text = std::move(t);
        c.rule = rule;
        return true;
    };
    auto block = [&](std::string_view tag) {
        int found = doc.ancestor_or_self(region.node, tag);
        if (found < 0 && region.trigger != Trigger::kPattern) {
            int next = doc.next_element_after(region.node);
            if (next >= 0 && doc.node(next).tag == tag) found = next;
        }
        return found;
    };

    if (int dt = doc.ancestor_or_self(region.node, "dt"); dt >= 0) {
        int dd = doc.next_sibling_element(dt);
        if (dd >= 0 && doc.node(dd).tag == "dd" && accept(dd, Rule::kDdAfterDt)) return c;
    }
    if (accept(block("p"), Rule::kParagraph)) return c;
    if (accept(block("ul"), Rule::kItemization)) return c;

    const auto& sentences = doc.sentences();
    auto first = std::find_if(sentences.begin(), sentences.end(), [&](Span s) {
        return region.trigger == Trigger::kPattern ? s.end > region.begin : s.end > region.end;
    });
    if (first != sentences.end() && n_sentences > 0) {
        auto last = first + static_cast<std::ptrdiff_t>(std::min<std::size_t>(n_sentences, static_cast<std::size_t>(sentences.end() - first)) - 1);
        c.text = doc.trimmed(first->begin, last->end);
        c.rule = Rule::kSentences;
        if (!c.text.empty()) return c;
    }
    throw ExtractionError("no fragment for region at offset " + std::to_string(region.begin) + " of '" + page.url + "'");
}

inline Candidate extract_fragment(const Page& page, std::string_view term, const Region& region, std::size_t n_sentences = 3) {
    return extract_fragment(html::Document::parse(page.normalized_text), page, term, region, n_sentences);
}

/// Extracts fragments from every region of every page, in rank order, keeping the first copy of
/// each distinct (whitespace-normalized) text.
inline std::vector<Candidate> extract_all(const std::vector<Page>& pages, std::string_view term, const PatternSet& patterns,
                                          const Tokenizer& tokenizer, const ExtractOptions& options = {}) {
    std::vector<const Page*> ordered;
    ordered.reserve(pages.size());
    for (const auto& p : pages) ordered.push_back(&p);
    std::stable_sort(ordered.begin(), ordered.end(), [](const Page* a, const Page* b) { return a->rank < b->rank; });

    std::vector<Candidate> out;
    std::unordered_set<std::string> seen;
    for (const Page* page : ordered) {
        auto doc = html::Document::parse(page->normalized_text);
        for (const Region& region : find_regions(doc, term, patterns, tokenizer, options)) {
            Candidate c;
            try {
                c = extract_fragment(doc, *page, term, region, options.n_sentences);
            } catch (const ExtractionError&) {
                continue;
            }
            if (seen.insert(utf8::collapse_whitespace(c.text)).second) out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace encyclogen
