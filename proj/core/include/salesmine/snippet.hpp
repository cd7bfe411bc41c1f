#pragma once

#include <cstddef>
#include <vector>

#include "salesmine/ingest.hpp"

namespace salesmine {

// A validated customer question and the utterances that follow it.
// `candidates` index into `followers` and select the Sales turns that may
// answer the question.
struct DialogSnippet {
  Utterance query;
  std::vector<Utterance> followers;
  std::vector<std::size_t> candidates;
};

}  // namespace salesmine
