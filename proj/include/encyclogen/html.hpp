#pragma once

// Lenient HTML handling for extraction: a tag scanner, page normalization, and a small
// document tree whose nodes carry byte ranges into the page's tag-stripped text.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "encyclogen/tokenizer.hpp"
#include "encyclogen/utf8.hpp"

namespace encyclogen::html {

struct TagToken {
    std::string name;  // lowercase
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;  // one past '>'
};

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

inline bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == ':' ||
           c == '_';
}

/// Scans an element tag at `pos` (which must hold '<'). Returns nothing when the '<' does not
/// open a tag, in which case it is ordinary text.
inline std::optional<TagToken> scan_tag(std::string_view s, std::size_t pos) {
    std::size_t i = pos + 1;
    TagToken tok;
    if (i < s.size() && s[i] == '/') {
        tok.closing = true;
        ++i;
    }
    if (i >= s.size() || !((s[i] >= 'a' && s[i] <= 'z') || (s[i] >= 'A' && s[i] <= 'Z'))) return std::nullopt;
    std::size_t name_begin = i;
    while (i < s.size() && is_name_char(s[i])) ++i;
    tok.name = lower(s.substr(name_begin, i - name_begin));
    char quote = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (quote != 0) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            tok.self_closing = i > pos && s[i - 1] == '/';
            tok.end = i + 1;
            return tok;
        }
    }
    tok.end = s.size();
    return tok;
}

/// End of a markup declaration, comment or processing instruction at `pos`, if one starts there.
inline std::optional<std::size_t> scan_declaration(std::string_view s, std::size_t pos) {
    if (s.compare(pos, 4, "<!--") == 0) {
        auto close = s.find("-->", pos + 4);
        return close == std::string_view::npos ? s.size() : close + 3;
    }
    if (pos + 1 < s.size() && (s[pos + 1] == '!' || s[pos + 1] == '?')) {
        auto close = s.find('>', pos + 2);
        return close == std::string_view::npos ? s.size() : close + 1;
    }
    return std::nullopt;
}

inline const std::set<std::string>& default_discardable_tags() {
    static const std::set<std::string> tags{"script", "style", "comment"};
    return tags;
}

/// Elements whose content goes with them when they are discarded.
inline bool is_raw_text_element(std::string_view name) {
    return name == "script" || name == "style" || name == "noscript" || name == "template" || name == "iframe" ||
           name == "object" || name == "textarea";
}

namespace detail {

inline std::string discard_once(std::string_view s, const std::set<std::string>& discardable) {
    const bool drop_comments = discardable.count("comment") > 0;
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '<') {
            out.push_back(s[i++]);
            continue;
        }
        if (drop_comments && s.compare(i, 4, "<!--") == 0) {
            i = *scan_declaration(s, i);
            continue;
        }
        auto tag = scan_tag(s, i);
        if (!tag || discardable.count(tag->name) == 0) {
            std::size_t end = tag ? tag->end : i + 1;
            out.append(s.substr(i, end - i));
            i = end;
            continue;
        }
        i = tag->end;
        if (!tag->closing && !tag->self_closing && is_raw_text_element(tag->name)) {
            // Skip to the matching close tag, or to the end of input when it is missing.
            std::size_t j = i;
            std::size_t resume = s.size();
            while ((j = s.find('<', j)) != std::string_view::npos) {
                auto close = scan_tag(s, j);
                if (close && close->closing && close->name == tag->name) {
                    resume = close->end;
                    break;
                }
                ++j;
            }
            i = resume;
        }
    }
    return out;
}

}  // namespace detail

/// Standardizes a page: drops discardable elements (script/style content included, plain tags
/// only for other names), comments when "comment" is listed, newline codes and redundant
/// whitespace. Every other tag is kept verbatim for the extractor. Idempotent.
inline std::string normalize(std::string_view raw, const std::set<std::string>& discardable = default_discardable_tags()) {
    std::string current = utf8::collapse_whitespace(detail::discard_once(raw, discardable));
    for (;;) {
        std::string next = utf8::collapse_whitespace(detail::discard_once(current, discardable));
        if (next == current) return current;
        current = std::move(next);
    }
}

/// Decodes a character reference at `pos` (which holds '&'); returns the replacement and sets
/// `len` to the bytes consumed.
inline std::optional<std::string> decode_entity(std::string_view s, std::size_t pos, std::size_t& len) {
    auto semi = s.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 10) return std::nullopt;
    std::string_view name = s.substr(pos + 1, semi - pos - 1);
    len = semi - pos + 1;
    std::string out;
    if (!name.empty() && name[0] == '#') {
        std::uint32_t cp = 0;
        bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
        std::string_view digits = name.substr(hex ? 2 : 1);
        if (digits.empty()) return std::nullopt;
        for (char c : digits) {
            int v = -1;
            if (c >= '0' && c <= '9') v = c - '0';
            else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
            else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
            if (v < 0) return std::nullopt;
            cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            if (cp > 0x10FFFF) return std::nullopt;
        }
        if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) cp = utf8::kReplacement;
        utf8::append(out, cp);
        return out;
    }
    static constexpr std::array<std::pair<std::string_view, char32_t>, 14> kNamed{{
        {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''}, {"nbsp", 0xA0},
        {"copy", 0xA9}, {"reg", 0xAE}, {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026},
        {"laquo", 0xAB}, {"raquo", 0xBB}, {"middot", 0xB7},
    }};
    for (auto [n, cp] : kNamed) {
        if (name == n) {
            utf8::append(out, cp);
            return out;
        }
    }
    return std::nullopt;
}

inline bool is_void_element(std::string_view n) {
    static const std::set<std::string, std::less<>> kVoid{"area", "base", "br", "col", "embed", "hr", "img",
                                                          "input", "link", "meta", "param", "source", "track", "wbr"};
    return kVoid.count(n) > 0;
}

/// Elements that delimit text chunks; sentences never cross their boundaries.
inline bool is_block_element(std::string_view n) {
    static const std::set<std::string, std::less<>> kBlock{
        "address", "article", "aside", "blockquote", "body", "caption", "dd", "div", "dl", "dt", "fieldset",
        "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "h7", "h8", "h9",
        "header", "hr", "html", "li", "main", "nav", "ol", "p", "pre", "section", "table", "tbody", "td",
        "tfoot", "th", "thead", "title", "tr", "ul"};
    return kBlock.count(n) > 0;
}

struct Node {
    std::string tag;   // empty for text nodes
    std::string text;  // raw text of text nodes
    int parent = -1;
    std::vector<int> children;
    std::size_t begin = 0;  // range in Document::text()
    std::size_t end = 0;

    bool is_text() const { return tag.empty(); }
};

/// Parsed page. Node 0 is a synthetic root; every node maps to a contiguous range of the
/// tag-stripped, whitespace-collapsed page text.
class Document {
  public:
    static Document parse(std::string_view html) {
        Document doc;
        doc.nodes_.push_back(Node{"#root", {}, -1, {}, 0, 0});
        doc.build(html);
        doc.layout();
        return doc;
    }

    const std::string& text() const { return text_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

    /// Sentence spans of the page text, segmented within block-bounded chunks.
    const std::vector<Span>& sentences() const { return sentences_; }

    /// Trimmed text covered by a node.
    std::string node_text(int id) const {
        const Node& n = node(id);
        return trimmed(n.begin, n.end);
    }

    std::string trimmed(std::size_t begin, std::size_t end) const {
        while (begin < end && text_[begin] == ' ') ++begin;
        while (end > begin && text_[end - 1] == ' ') --end;
        return text_.substr(begin, end - begin);
    }

    int ancestor_or_self(int id, std::string_view tag) const {
        for (int cur = id; cur >= 0; cur = node(cur).parent)
            if (node(cur).tag == tag) return cur;
        return -1;
    }

    /// Next element sibling, skipping whitespace-only text; -1 when there is none or when real
    /// text intervenes.
    int next_sibling_element(int id) const {
        const Node& n = node(id);
        if (n.parent < 0) return -1;
        const auto& sib = node(n.parent).children;
        auto it = std::find(sib.begin(), sib.end(), id);
        for (++it; it != sib.end(); ++it) {
            const Node& s = node(*it);
            if (!s.is_text()) return *it;
            if (!utf8::collapse_whitespace(s.text).empty()) return -1;
        }
        return -1;
    }

    /// First element that follows `id` in document order outside its subtree, climbing to
    /// ancestors' siblings as needed. Intervening text (other than whitespace) stops the search.
    int next_element_after(int id) const {
        for (int cur = id; cur > 0; cur = node(cur).parent) {
            const auto& sib = node(node(cur).parent).children;
            auto it = std::find(sib.begin(), sib.end(), cur);
            for (++it; it != sib.end(); ++it) {
                const Node& s = node(*it);
                if (!s.is_text()) return *it;
                if (!utf8::collapse_whitespace(s.text).empty()) return -1;
            }
        }
        return -1;
    }

    /// Deepest element whose range contains the byte at `offset`.
    int element_at(std::size_t offset) const {
        int cur = 0;
        for (;;) {
            int found = -1;
            for (int child : node(cur).children) {
                const Node& c = node(child);
                if (!c.is_text() && c.begin <= offset && offset < c.end) {
                    found = child;
                    break;
                }
            }
            if (found < 0) return cur;
            cur = found;
        }
    }

  private:
    int add(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size() - 1);
    }

    void attach(int parent, Node n) {
        n.parent = parent;
        int id = add(std::move(n));
        nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    }

    // Pops up to and including the nearest open `targets` element, unless a `stops` element is
    // reached first.
    void close_open(std::vector<int>& stack, std::initializer_list<std::string_view> targets,
                    std::initializer_list<std::string_view> stops) {
        for (std::size_t i = stack.size(); i-- > 1;) {
            const std::string& tag = node(stack[i]).tag;
            if (std::find(targets.begin(), targets.end(), tag) != targets.end()) {
                stack.resize(i);
                return;
            }
            if (std::find(stops.begin(), stops.end(), tag) != stops.end()) return;
        }
    }

    void build(std::string_view s) {
        std::vector<int> stack{0};
        std::string pending_text;
        auto flush_text = [&] {
            if (!pending_text.empty()) attach(stack.back(), Node{{}, std::move(pending_text), -1, {}, 0, 0});
            pending_text.clear();
        };
        std::size_t i = 0;
        while (i < s.size()) {
            if (s[i] != '<') {
                pending_text.push_back(s[i++]);
                continue;
            }
            if (auto decl = scan_declaration(s, i)) {
                i = *decl;
                continue;
            }
            auto tag = scan_tag(s, i);
            if (!tag) {
                pending_text.push_back(s[i++]);
                continue;
            }
            flush_text();
            i = tag->end;
            const std::string& name = tag->name;
            if (tag->closing) {
                for (std::size_t k = stack.size(); k-- > 1;) {
                    if (node(stack[k]).tag == name) {
                        stack.resize(k);
                        break;
                    }
                }
                continue;
            }
            if (is_block_element(name))
                close_open(stack, {"p"}, {"td", "th", "li", "dd", "dt", "div", "blockquote", "body", "html"});
            if (name == "li") close_open(stack, {"li"}, {"ul", "ol"});
            if (name == "dt" || name == "dd") close_open(stack, {"dt", "dd"}, {"dl"});
            if (name == "td" || name == "th") close_open(stack, {"td", "th"}, {"tr", "table"});
            if (name == "tr") close_open(stack, {"tr"}, {"table"});
            attach(stack.back(), Node{name, {}, -1, {}, 0, 0});
            if (!tag->self_closing && !is_void_element(name)) stack.push_back(static_cast<int>(nodes_.size() - 1));
        }
        flush_text();
    }

    void layout() {
        boundaries_.clear();
        pending_space_ = false;
        walk(0);
        boundaries_.push_back(text_.size());
        std::sort(boundaries_.begin(), boundaries_.end());
        std::size_t prev = 0;
        for (std::size_t b : boundaries_) {
            if (b > prev) {
                for (Span sp : sentence_spans(std::string_view(text_).substr(prev, b - prev)))
                    sentences_.push_back({sp.begin + prev, sp.end + prev});
            }
            prev = std::max(prev, b);
        }
    }

    void emit_text(std::string_view raw) {
        for (std::size_t i = 0; i < raw.size();) {
            std::string piece;
            std::size_t len = 1;
            if (raw[i] == '&') {
                if (auto ent = decode_entity(raw, i, len)) {
                    piece = *ent;
                } else {
                    piece = "&";
                    len = 1;
                }
            } else {
                utf8::decode(raw, i, len);
                piece = std::string(raw.substr(i, len));
            }
            std::size_t plen = 0;
            if (utf8::is_space(utf8::decode(piece, 0, plen))) {
                if (!text_.empty()) pending_space_ = true;
            } else {
                if (pending_space_) text_.push_back(' ');
                pending_space_ = false;
                text_ += piece;
            }
            i += len;
        }
    }

    void walk(int id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.is_text()) {
            n.begin = text_.size();
            emit_text(n.text);
            nodes_[static_cast<std::size_t>(id)].end = text_.size();
            return;
        }
        const bool block = is_block_element(n.tag) || n.tag == "br";
        if (block && !text_.empty()) pending_space_ = true;
        if (is_block_element(nodes_[static_cast<std::size_t>(id)].tag)) boundaries_.push_back(text_.size() + (pending_space_ ? 1 : 0));
        nodes_[static_cast<std::size_t>(id)].begin = text_.size();
        std::vector<int> children = nodes_[static_cast<std::size_t>(id)].children;
        for (int child : children) walk(child);
        Node& done = nodes_[static_cast<std::size_t>(id)];
        done.end = text_.size();
        if (block && !text_.empty()) pending_space_ = true;
        if (is_block_element(done.tag)) boundaries_.push_back(text_.size());
    }

    std::vector<Node> nodes_;
    std::string text_;
    std::vector<Span> sentences_;
    std::vector<std::size_t> boundaries_;
    bool pending_space_ = false;
};

/// Tag-stripped, whitespace-collapsed text of an HTML fragment.
inline std::string strip_tags(std::string_view html) { return Document::parse(html).text(); }

}  // namespace encyclogen::html
