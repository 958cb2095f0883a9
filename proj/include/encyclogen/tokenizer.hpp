#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>
#include <utility>
#include <vector>

#include "encyclogen/error.hpp"
#include "encyclogen/utf8.hpp"

namespace encyclogen {

/// Byte range of a sentence inside the segmented text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

constexpr bool is_sentence_terminal(char32_t c) {
    return c == '.' || c == '!' || c == '?' || c == 0xFF01 || c == 0xFF1F;
}

/// CJK terminals end a sentence even without following whitespace.
constexpr bool is_cjk_terminal(char32_t c) { return c == 0x3002; }

/// Sentence spans (trimmed) of `text`. A sentence ends at terminal punctuation followed by
/// whitespace or the end of input; an unterminated tail is a sentence of its own.
inline std::vector<Span> sentence_spans(std::string_view text) {
    std::vector<Span> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t b, std::size_t e) {
        while (b < e) {
            std::size_t len = 0;
            if (!utf8::is_space(utf8::decode(text, b, len))) break;
            b += len;
        }
        while (e > b) {
            std::size_t p = e - 1;
            while (p > b && (static_cast<unsigned char>(text[p]) & 0xC0) == 0x80) --p;
            std::size_t len = 0;
            if (!utf8::is_space(utf8::decode(text, p, len))) break;
            e = p;
        }
        if (b < e) out.push_back({b, e});
    };
    for (std::size_t i = 0; i < text.size();) {
        std::size_t len = 0;
        char32_t cp = utf8::decode(text, i, len);
        std::size_t next = i + len;
        if (is_cjk_terminal(cp)) {
            emit(start, next);
            start = next;
        } else if (is_sentence_terminal(cp)) {
            std::size_t nlen = 0;
            if (next >= text.size() || utf8::is_space(utf8::decode(text, next, nlen))) {
                emit(start, next);
                start = next;
            }
        }
        i = next;
    }
    emit(start, text.size());
    return out;
}

/// Word tokenization and sentence segmentation used by every statistical component. One
/// instance is configured per run; its fingerprint is stored in trained models so statistics
/// built with one tokenizer are never scored with another.
class Tokenizer {
  public:
    virtual ~Tokenizer() = default;

    virtual std::vector<std::string> tokenize(std::string_view text) const = 0;

    virtual std::vector<std::string> segment(std::string_view text) const {
        std::vector<std::string> out;
        for (auto span : sentence_spans(text)) out.emplace_back(text.substr(span.begin, span.end - span.begin));
        return out;
    }

    virtual std::string fingerprint() const = 0;
};

/// Default tokenizer: case-folded words over Unicode letters and digits. Apostrophes join
/// letters ("don't"), periods and commas join digits ("3.14"). Each ideograph or hiragana
/// character is a word; katakana runs stay together. All other characters separate words.
class UnicodeTokenizer final : public Tokenizer {
  public:
    std::vector<std::string> tokenize(std::string_view text) const override {
        std::vector<std::string> tokens;
        std::string current;
        enum class Kind { kNone, kAlnum, kKatakana } kind = Kind::kNone;
        char32_t prev = 0;
        auto flush = [&] {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            kind = Kind::kNone;
        };
        for (std::size_t i = 0; i < text.size();) {
            std::size_t len = 0;
            char32_t cp = utf8::decode(text, i, len);
            std::size_t next = i + len;
            if (utf8::is_alnum(cp)) {
                if (kind != Kind::kAlnum) flush();
                kind = Kind::kAlnum;
                utf8::append(current, utf8::fold(cp));
            } else if (utf8::is_katakana(cp)) {
                if (kind != Kind::kKatakana) flush();
                kind = Kind::kKatakana;
                utf8::append(current, cp);
            } else if (utf8::is_ideographic(cp)) {
                flush();
                std::string one;
                utf8::append(one, cp);
                tokens.push_back(std::move(one));
            } else if (kind == Kind::kAlnum && next < text.size() && is_joiner(prev, cp, text, next)) {
                utf8::append(current, cp == 0x2019 ? char32_t{'\''} : cp);
            } else {
                flush();
            }
            prev = cp;
            i = next;
        }
        flush();
        return tokens;
    }

    std::string fingerprint() const override { return "unicode-default/1"; }

  private:
    static bool is_joiner(char32_t prev, char32_t cp, std::string_view text, std::size_t next) {
        std::size_t len = 0;
        char32_t after = utf8::decode(text, next, len);
        bool letters = utf8::is_alnum(prev) && !utf8::is_digit(prev) && utf8::is_alnum(after) && !utf8::is_digit(after);
        if ((cp == '\'' || cp == 0x2019) && letters) return true;
        return (cp == '.' || cp == ',') && utf8::is_digit(prev) && utf8::is_digit(after);
    }
};

/// Adapter for an external analyzer (for example a morphological analyzer). The command reads
/// one line of text on standard input and writes whitespace-separated tokens on standard
/// output. Tokens are case-folded; sentence segmentation uses the built-in rules.
class ExternalTokenizer final : public Tokenizer {
  public:
    explicit ExternalTokenizer(std::string command) : command_(std::move(command)) {
        if (command_.empty()) throw ConfigError("external tokenizer: empty command");
    }

    std::vector<std::string> tokenize(std::string_view text) const override {
        std::string line = utf8::collapse_whitespace(text);
        if (line.empty()) return {};

        char path[] = "/tmp/encyclogen-tok-XXXXXX";
        int fd = ::mkstemp(path);
        if (fd < 0) throw Error("external tokenizer: cannot create temporary file");
        ::close(fd);
        {
            std::ofstream tmp(path, std::ios::binary);
            tmp << line << '\n';
        }
        std::string cmd = command_ + " < '" + path + "'";
        std::FILE* pipe = ::popen(cmd.c_str(), "r");
        if (pipe == nullptr) {
            std::remove(path);
            throw Error("external tokenizer: cannot run '" + command_ + "'");
        }
        std::string output;
        char buf[4096];
        std::size_t n = 0;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
        int status = ::pclose(pipe);
        std::remove(path);
        if (status != 0) throw Error("external tokenizer: '" + command_ + "' exited with status " + std::to_string(status));

        std::vector<std::string> tokens;
        std::istringstream in(output);
        std::string tok;
        while (in >> tok) tokens.push_back(utf8::fold_case(tok));
        return tokens;
    }

    std::string fingerprint() const override { return "external:" + command_; }

  private:
    std::string command_;
};

/// Builds a tokenizer from its configuration value: `unicode-default` or `external:<command>`.
inline std::unique_ptr<Tokenizer> make_tokenizer(std::string_view spec) {
    if (spec.empty() || spec == "unicode-default") return std::make_unique<UnicodeTokenizer>();
    constexpr std::string_view kExternal = "external:";
    if (spec.substr(0, kExternal.size()) == kExternal)
        return std::make_unique<ExternalTokenizer>(std::string(spec.substr(kExternal.size())));
    throw ConfigError("unknown tokenizer '" + std::string(spec) + "'");
}

/// Rejects a model trained under a different tokenizer.
inline void require_fingerprint(std::string_view model_fingerprint, const Tokenizer& tokenizer,
                                std::string_view what) {
    if (model_fingerprint != tokenizer.fingerprint()) {
        throw ConfigError(std::string(what) + " was trained with tokenizer '" + std::string(model_fingerprint) +
                          "' but the configured tokenizer is '" + tokenizer.fingerprint() + "'");
    }
}

}  // namespace encyclogen
