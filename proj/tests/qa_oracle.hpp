#pragma once

// Planted question sets for the QA tests and the acceptance binary.

#include <string>
#include <vector>

#include "encyclogen/organizer.hpp"
#include "encyclogen/qa.hpp"

namespace encyclogen::testutil {

struct Planted {
    std::vector<EncyclopediaEntry> store_a;  // terms 0..n/2
    std::vector<EncyclopediaEntry> store_b;  // terms n/4..n-1, so the stores overlap
    std::vector<Question> questions;
};

/// `n` terms, each with a distinctive description of three unique words. Even question ids are
/// type 1, odd ones type 2, and distractors describe other terms, so every covered question has
/// exactly one overlapping choice.
inline Planted planted_questions(std::size_t n) {
    auto term = [](std::size_t i) { return "term" + std::to_string(i); };
    auto desc = [](std::size_t i) {
        std::string s = std::to_string(i);
        return "alpha" + s + " beta" + s + " gamma" + s + " device";
    };
    auto entry = [&](std::size_t i) {
        EncyclopediaEntry e{term(i), EntryStatus::kOk, {}};
        e.groups.push_back({"computers", {{desc(i), -2.0, 1.0, "http://x/" + std::to_string(i), 1, Rule::kParagraph, Trigger::kPattern}}});
        return e;
    };
    Planted p;
    for (std::size_t i = 0; i < n; ++i) {
        if (i <= n / 2) p.store_a.push_back(entry(i));
        if (i >= n / 4) p.store_b.push_back(entry(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        Question q;
        q.id = "q" + std::to_string(i);
        q.gold = static_cast<int>(i % 4);
        for (std::size_t c = 0; c < 4; ++c) {
            std::size_t other = (i + c + 4 - static_cast<std::size_t>(q.gold)) % n;
            if (c != static_cast<std::size_t>(q.gold) && other == i) other = (i + 7) % n;
            std::size_t pick = c == static_cast<std::size_t>(q.gold) ? i : other;
            q.choices[c] = i % 2 == 0 ? desc(pick) : term(pick);
        }
        q.qtype = i % 2 == 0 ? QuestionType::kTermToDescription : QuestionType::kDescriptionToTerm;
        q.stem = i % 2 == 0 ? term(i) : desc(i);
        p.questions.push_back(q);
    }
    return p;
}

inline KnowledgeBase kb_of(const std::vector<EncyclopediaEntry>& entries) {
    KnowledgeBase kb;
    for (const auto& e : entries) kb.add(e);
    return kb;
}

}  // namespace encyclogen::testutil
