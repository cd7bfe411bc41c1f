#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesmine/clustering.hpp"
#include "salesmine/ingest.hpp"
#include "salesmine/qa_extract.hpp"
#include "salesmine/search_index.hpp"
#include "salesmine/sop_engine.hpp"

// JSON shapes of every persisted document. Schemas: docs/documents.md.
namespace salesmine {

nlohmann::json to_json(const Utterance& u);
nlohmann::json to_json(const Chatlog& c);
Chatlog chatlog_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChatlogStats& s);

nlohmann::json to_json(const QAPair& p);
nlohmann::json to_json(std::span<const QAPair> pairs);
std::vector<QAPair> qa_pairs_from_json(const nlohmann::json& j);

// Member vectors and centroids are not persisted; they are recomputed
// from text when needed.
nlohmann::json to_json(const Cluster& c);
nlohmann::json to_json(std::span<const Cluster> clusters);
std::vector<Cluster> clusters_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SopExecution& e);
nlohmann::json to_json(const DashboardStats& s);

nlohmann::json to_json(const SearchIndex& index, std::span<const SearchHit> hits);

// Pretty-printed with two-space indent and a trailing newline. Every
// document written by the CLI and the service goes through this.
std::string render_document(const nlohmann::json& doc);

}  // namespace salesmine
