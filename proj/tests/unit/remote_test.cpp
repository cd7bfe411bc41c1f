#include <doctest.h>

#include <thread>

#include "fake_model_server.hpp"
#include "salesmine/qa_extract.hpp"
#include "salesmine/remote_client.hpp"
#include "salesmine/scoring.hpp"
#include "salesmine/sop_engine.hpp"
#include "test_support.hpp"

using namespace salesmine;
using nlohmann::json;
using salesmine::testing::FakeModelServer;

namespace {

ScorerConfig remote_config(const FakeModelServer& server) {
  ScorerConfig cfg;
  cfg.backend = ScorerBackend::Remote;
  cfg.remote_url = server.url();
  return cfg;
}

// A port nothing listens on: bind, read the port, close.
std::string dead_url() {
  httplib::Server s;
  const int port = s.bind_to_any_port("127.0.0.1");
  return "http://127.0.0.1:" + std::to_string(port);
}

}  // namespace

TEST_SUITE("remote") {

TEST_CASE("question labels are returned verbatim") {
  FakeModelServer server;
  server.on("/v1/question_labels", [](const json& req) {
    CHECK(req.at("text") == "is it refundable");
    return json{{"semantic_integrity", 0.9}, {"not_chitchat", 0.8}, {"legal_inquiry", 0.25}};
  });
  RemoteScorer scorer(remote_config(server));
  CHECK(scorer.score_question("is it refundable") == LabelScores{0.9, 0.8, 0.25});
}

TEST_CASE("answer scores carry the whole snippet") {
  FakeModelServer server;
  server.on("/v1/answer_scores", [](const json& req) {
    CHECK(req.at("query").at("text") == "can I pay later?");
    CHECK(req.at("query").at("speaker") == "customer");
    CHECK(req.at("followers").size() == 3);
    CHECK(req.at("followers")[1].at("speaker") == "customer");
    CHECK(req.at("candidates") == json::array({0, 2}));
    return json{{"scores", {0.3, 0.95}}};
  });
  const Dialog d = testing::make_dialog(
      "d", {{'C', "can I pay later?"}, {'S', "one sec"}, {'C', "thanks"}, {'S', "yes, pay later in 3 parts"}});
  const std::size_t validated[] = {0};
  const DialogSnippet snip = build_snippet(d, 0, 6, validated);
  RemoteScorer scorer(remote_config(server));
  const auto scores = scorer.score_answers(snip);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0] == CandidateScore{0, 0.3});
  CHECK(scores[1] == CandidateScore{1, 0.95});
  const auto pair = select_answer(snip, scorer);
  REQUIRE(pair.has_value());
  CHECK(pair->answer_index == 3);
  CHECK(pair->score == 0.95);
}

TEST_CASE("remote embeddings are renormalized") {
  FakeModelServer server;
  server.on("/v1/embed", [](const json&) { return json{{"vector", {3.0, 4.0}}}; });
  RemoteScorer scorer(remote_config(server));
  const EmbeddingVector v = scorer.embed("x");
  CHECK(v.values == std::vector<double>{0.6, 0.8});
}

TEST_CASE("pair score maps onto [-1,1]") {
  FakeModelServer server;
  server.on("/v1/pair_score", [](const json& req) {
    CHECK(req.at("text_a") == "a");
    CHECK(req.at("text_b") == "b");
    return json{{"score", 0.25}};
  });
  RemoteScorer scorer(remote_config(server));
  CHECK(scorer.relevance("a", "b") == -0.5);
}

TEST_CASE("remote failures surface as RemoteUnavailable") {
  SUBCASE("unreachable") {
    ScorerConfig cfg;
    cfg.backend = ScorerBackend::Remote;
    cfg.remote_url = dead_url();
    RemoteScorer scorer(cfg);
    try {
      scorer.score_question("hello there friend");
      FAIL("expected RemoteUnavailable");
    } catch (const RemoteUnavailable& e) {
      CHECK(e.url() == *cfg.remote_url);
      CHECK_FALSE(e.cause().empty());
    }
  }
  SUBCASE("server error status") {
    FakeModelServer server;
    server.on("/v1/embed", [](const json&) { return json{}; });
    server.fail_with(500);
    CHECK_THROWS_AS(RemoteScorer(remote_config(server)).embed("x"), RemoteUnavailable);
  }
  SUBCASE("unparsable body") {
    FakeModelServer server;
    server.on("/v1/question_labels", [](const json&) { return json{}; });
    server.reply_raw("{not json");
    CHECK_THROWS_AS(RemoteScorer(remote_config(server)).score_question("x"), RemoteUnavailable);
  }
  SUBCASE("out of range label") {
    FakeModelServer server;
    server.on("/v1/question_labels",
              [](const json&) { return json{{"semantic_integrity", 2}, {"not_chitchat", 1}, {"legal_inquiry", 1}}; });
    CHECK_THROWS_AS(RemoteScorer(remote_config(server)).score_question("x"), RemoteUnavailable);
  }
  SUBCASE("wrong number of answer scores") {
    FakeModelServer server;
    server.on("/v1/answer_scores", [](const json&) { return json{{"scores", {0.5}}}; });
    const Dialog d = testing::make_dialog("d", {{'C', "q?"}, {'S', "a"}, {'S', "b"}});
    const std::size_t validated[] = {0};
    CHECK_THROWS_AS(RemoteScorer(remote_config(server)).score_answers(build_snippet(d, 0, 6, validated)),
                    RemoteUnavailable);
  }
  SUBCASE("slow service hits the timeout") {
    FakeModelServer server;
    server.on("/v1/embed", [](const json&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      return json{{"vector", {1.0}}};
    });
    RemoteModelClient client(server.url(), std::chrono::milliseconds(150));
    CHECK_THROWS_AS(client.post("/v1/embed", {{"text", "x"}}), RemoteUnavailable);
  }
}

TEST_CASE("base url path prefix is kept") {
  FakeModelServer server;
  server.on("/models/v1/embed", [](const json&) { return json{{"vector", {1.0, 0.0}}}; });
  RemoteModelClient client(server.url() + "/models/");
  CHECK(client.post("/v1/embed", {{"text", "x"}}).at("vector").size() == 2);
}

TEST_CASE("remote intent labels are restricted to the vocabulary") {
  FakeModelServer server;
  server.on("/v1/intents", [](const json& req) {
    CHECK(req.at("vocabulary") == json::array({"affordability", "competitors"}));
    return json{{"labels", {"affordability", "weather"}}};
  });
  IntentModel model(std::set<std::string>{"affordability", "competitors"}, server.url());
  CHECK(model.backend() == IntentBackend::Remote);
  CHECK(classify_intent("too expensive", model) == std::set<std::string>{"affordability"});
}

}
