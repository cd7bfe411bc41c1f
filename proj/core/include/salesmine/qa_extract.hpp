#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salesmine/ingest.hpp"
#include "salesmine/scoring.hpp"
#include "salesmine/snippet.hpp"

namespace salesmine {

inline constexpr std::size_t kDefaultSnippetWindow = 6;

struct QAPair {
  std::string question;
  std::string answer;
  double score = 0.0;
  std::string dialog_id;
  std::size_t question_index = 0;
  std::size_t answer_index = 0;

  friend bool operator==(const QAPair&, const QAPair&) = default;
};

struct QaConfig {
  std::size_t window = kDefaultSnippetWindow;  // r: the question plus up to r-1 followers
};

// Customer utterances passing the three-aspect gate, in dialog order.
std::vector<Utterance> extract_questions(const Dialog& dialog, const Scorer& scorer);

// Followers are the next min(r-1, remaining) utterances, cut short before
// the next validated customer question. `validated_turns` lists the turn
// indices of every validated question in the dialog (any order).
DialogSnippet build_snippet(const Dialog& dialog, std::size_t question_index, std::size_t window,
                            std::span<const std::size_t> validated_turns);

// Highest-scoring candidate when its score is strictly above the answer
// threshold; ties go to the earliest candidate.
std::optional<QAPair> select_answer(const DialogSnippet& snippet, const Scorer& scorer);

// Pure selection rule over precomputed scores; index into `scores`.
std::optional<std::size_t> pick_answer(std::span<const CandidateScore> scores, double threshold);

// Every QA pair of one dialog, before deduplication.
std::vector<QAPair> extract_dialog_pairs(const Dialog& dialog, const Scorer& scorer,
                                         const QaConfig& config);

// Full pipeline over the chatlog. Pairs are deduplicated on text::token_key of the
// question (highest score kept) and ordered by score desc, then
// dialog_id, then question_index.
std::vector<QAPair> extract_faq(const Chatlog& chatlog, const Scorer& scorer, const QaConfig& config);

// Dedup + ordering step of extract_faq, exposed for composition checks.
std::vector<QAPair> dedup_and_order(std::vector<QAPair> pairs);

}  // namespace salesmine
