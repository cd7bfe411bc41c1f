#include "salesmine/qa_extract.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "salesmine/text.hpp"

namespace salesmine {

std::vector<Utterance> extract_questions(const Dialog& dialog, const Scorer& scorer) {
  std::vector<Utterance> out;
  for (const Utterance& u : dialog.utterances) {
    if (u.speaker != Speaker::Customer) continue;
    if (is_valid_question(scorer.score_question(u.text), scorer.config())) out.push_back(u);
  }
  return out;
}

DialogSnippet build_snippet(const Dialog& dialog, std::size_t question_index, std::size_t window,
                            std::span<const std::size_t> validated_turns) {
  if (window < 2) throw std::invalid_argument("snippet window must be >= 2");
  if (question_index >= dialog.utterances.size()) {
    throw std::out_of_range("question index outside dialog");
  }
  DialogSnippet snippet;
  snippet.query = dialog.utterances[question_index];
  const std::size_t limit = std::min(dialog.utterances.size(), question_index + window);
  for (std::size_t i = question_index + 1; i < limit; ++i) {
    const Utterance& u = dialog.utterances[i];
    if (u.speaker == Speaker::Customer &&
        std::find(validated_turns.begin(), validated_turns.end(), i) != validated_turns.end()) {
      break;
    }
    if (u.speaker == Speaker::Sales) snippet.candidates.push_back(snippet.followers.size());
    snippet.followers.push_back(u);
  }
  return snippet;
}

std::optional<std::size_t> pick_answer(std::span<const CandidateScore> scores, double threshold) {
  if (scores.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].score > scores[best].score) best = i;
  }
  if (!(scores[best].score > threshold)) return std::nullopt;
  return best;
}

std::optional<QAPair> select_answer(const DialogSnippet& snippet, const Scorer& scorer) {
  if (snippet.candidates.empty()) return std::nullopt;
  const std::vector<CandidateScore> scores = scorer.score_answers(snippet);
  const auto best = pick_answer(scores, scorer.config().answer_threshold);
  if (!best) return std::nullopt;
  const Utterance& answer = snippet.followers.at(snippet.candidates.at(scores[*best].candidate_index));
  return QAPair{snippet.query.text, answer.text,           scores[*best].score,
                snippet.query.dialog_id, snippet.query.turn_index, answer.turn_index};
}

std::vector<QAPair> extract_dialog_pairs(const Dialog& dialog, const Scorer& scorer,
                                         const QaConfig& config) {
  const std::vector<Utterance> questions = extract_questions(dialog, scorer);
  std::vector<std::size_t> validated;
  validated.reserve(questions.size());
  for (const Utterance& q : questions) validated.push_back(q.turn_index);

  std::vector<QAPair> pairs;
  for (std::size_t turn : validated) {
    const DialogSnippet snippet = build_snippet(dialog, turn, config.window, validated);
    if (auto pair = select_answer(snippet, scorer)) pairs.push_back(std::move(*pair));
  }
  return pairs;
}

namespace {
bool output_order(const QAPair& a, const QAPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.dialog_id != b.dialog_id) return a.dialog_id < b.dialog_id;
  return a.question_index < b.question_index;
}
}  // namespace

std::vector<QAPair> dedup_and_order(std::vector<QAPair> pairs) {
  // Sorting first makes the first pair seen per key the one to keep.
  std::stable_sort(pairs.begin(), pairs.end(), output_order);
  std::vector<QAPair> out;
  std::map<std::string, bool> seen;  // keyed on token_key(question)
  for (QAPair& p : pairs) {
    if (seen.try_emplace(text::token_key(p.question), true).second) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<QAPair> extract_faq(const Chatlog& chatlog, const Scorer& scorer, const QaConfig& config) {
  std::vector<QAPair> all;
  for (const Dialog& d : chatlog.dialogs) {
    try {
      auto pairs = extract_dialog_pairs(d, scorer, config);
      all.insert(all.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
    } catch (const RemoteUnavailable& e) {
      throw RemoteUnavailable(e.url(), e.cause() + " (dialog " + d.dialog_id + ")");
    }
  }
  return dedup_and_order(std::move(all));
}

}  // namespace salesmine
