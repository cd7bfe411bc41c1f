// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status
// is the number of failed criteria.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "salesmine/clustering.hpp"
#include "salesmine/documents.hpp"
#include "salesmine/phrase_mining.hpp"
#include "salesmine/pipelines.hpp"
#include "salesmine/qa_extract.hpp"
#include "salesmine/search_index.hpp"
#include "salesmine/sop_engine.hpp"
#include "salesmine/store.hpp"
#include "salesmine/task_service.hpp"
#include "service_harness.hpp"
#include "sop_corpus.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace salesmine;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kInertiaMonotoneSlack = 1e-12;  // relative, per iteration
constexpr double kNearestSlack = 1e-12;          // absolute squared distance
constexpr double kReferenceInertiaTol = 1e-9;    // absolute
constexpr double kSignificanceTol = 1e-12;       // absolute
constexpr double kSearchScoreTol = 1e-12;        // absolute

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failures for one criterion; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
};

struct CommandResult {
  int status = -1;
  std::string out;
};

CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::string cli() { return quote(SALESMINE_CLI_PATH); }

// ---------------------------------------------------------------------------

void faq_golden(Check& c, std::string& detail) {
  const std::string cmd = cli() + " extract-faq --input " + quote(testing::fixture_path("faq_dialogs.csv"));
  const std::string expected = testing::read_fixture("faq_expected.json");
  double worst = 0.0;
  std::string first;
  for (int run = 0; run < 2; ++run) {
    const auto t0 = Clock::now();
    const CommandResult r = run_command(cmd);
    worst = std::max(worst, seconds_since(t0));
    c.expect(r.status == 0, "exit status " + std::to_string(r.status));
    c.expect(r.out == expected, "run " + std::to_string(run) + " differs from the expected document");
    if (run == 0) first = r.out;
    else c.expect(r.out == first, "two runs differ");
  }
  c.expect(worst < 5.0, "slowest run took " + std::to_string(worst) + " s");
  std::ostringstream d;
  d << json::parse(expected).size() << " pairs, slowest run " << worst << " s";
  detail = d.str();
}

class FixedScorer final : public Scorer {
 public:
  FixedScorer() : Scorer(ScorerConfig{}) {}
  void set(std::vector<double> s) { scores_ = std::move(s); }
  LabelScores score_question(std::string_view) const override { return {1, 1, 1}; }
  std::vector<CandidateScore> score_answers(const DialogSnippet& s) const override {
    if (s.candidates.empty()) throw EmptyCandidates();
    std::vector<CandidateScore> out;
    for (std::size_t i = 0; i < s.candidates.size(); ++i) out.push_back({i, scores_.at(i)});
    return out;
  }
  EmbeddingVector embed(std::string_view) const override { return {}; }
  double relevance(std::string_view, std::string_view) const override { return 0.0; }

 private:
  std::vector<double> scores_;
};

void threshold_law(Check& c, std::string& detail) {
  constexpr std::size_t kCases = 10000;
  std::mt19937_64 rng(20260501);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // A coarse grid makes ties and exact-threshold scores common.
  const std::array<double, 7> grid{0.0, 0.5, 0.74, 0.75, 0.7500001, 0.8, 1.0};
  std::uniform_int_distribution<std::size_t> grid_pick(0, grid.size() - 1);

  std::vector<Dialog> snippets_src;
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<testing::Turn> turns{{'C', "how much is the monthly plan?"}};
    for (std::size_t i = 0; i < n; ++i) turns.push_back({'S', "answer " + std::to_string(i)});
    snippets_src.push_back(testing::make_dialog("d" + std::to_string(n), turns));
  }
  const std::size_t validated[] = {0};
  FixedScorer scorer;
  std::size_t emitted = 0, violations = 0;
  for (std::size_t i = 0; i < kCases; ++i) {
    const std::size_t n = len(rng);
    std::vector<double> s(n);
    const bool coarse = unit(rng) < 0.5;
    for (double& x : s) x = coarse ? grid[grid_pick(rng)] : unit(rng);
    scorer.set(s);
    const DialogSnippet snip = build_snippet(snippets_src[n - 1], 0, n + 1, validated);
    const auto pair = select_answer(snip, scorer);

    const double best = *std::max_element(s.begin(), s.end());
    const std::size_t first_best = static_cast<std::size_t>(std::find(s.begin(), s.end(), best) - s.begin());
    bool ok = pair.has_value() == (best > 0.75);
    if (ok && pair) {
      ok = pair->answer == "answer " + std::to_string(first_best) && pair->score == best &&
           pair->answer_index == first_best + 1;
      ++emitted;
    }
    if (!ok) {
      ++violations;
      if (violations <= 3) c.expect(false, "case " + std::to_string(i) + " violates the law");
    }
  }
  c.expect(violations == 0, std::to_string(violations) + " violations");
  detail = std::to_string(kCases) + " cases, " + std::to_string(emitted) + " emitted, " +
           std::to_string(violations) + " violations";
}

std::vector<EmbeddingVector> random_unit_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<EmbeddingVector> out(n);
  for (auto& v : out) {
    v.values.resize(dim);
    for (double& x : v.values) x = g(rng);
    normalize_in_place(v);
  }
  return out;
}

bool bit_identical(const KMeansResult& a, const KMeansResult& b) {
  if (a.assignments != b.assignments || a.centroids.size() != b.centroids.size()) return false;
  if (a.inertia_history.size() != b.inertia_history.size()) return false;
  if (std::memcmp(a.inertia_history.data(), b.inertia_history.data(), a.inertia_history.size() * sizeof(double)) != 0)
    return false;
  for (std::size_t i = 0; i < a.centroids.size(); ++i) {
    const auto& x = a.centroids[i].values;
    const auto& y = b.centroids[i].values;
    if (x.size() != y.size() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

void kmeans_correctness(Check& c, std::string& detail) {
  const auto t0 = Clock::now();
  const auto points = random_unit_vectors(1000, 32, 7);
  const std::size_t k = choose_k(points.size());
  constexpr std::uint64_t kSeed = 1234;

  const auto init = kmeans_plus_plus(points, k, kSeed);
  const KMeansResult r = lloyd(points, init);

  const auto& h = r.inertia_history;
  for (std::size_t i = 1; i < h.size(); ++i) {
    c.expect(h[i] <= h[i - 1] * (1.0 + kInertiaMonotoneSlack),
             "inertia rose at iteration " + std::to_string(i));
  }
  std::size_t misassigned = 0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double own = squared_distance(points[p].values, r.centroids[r.assignments[p]].values);
    double best = own;
    for (const auto& ctr : r.centroids) best = std::min(best, squared_distance(points[p].values, ctr.values));
    if (own > best + kNearestSlack) ++misassigned;
  }
  c.expect(misassigned == 0, std::to_string(misassigned) + " points not at their nearest centroid");

  const KMeansResult a = kmeans(points, k, kSeed);
  const KMeansResult b = kmeans(points, k, kSeed);
  c.expect(bit_identical(a, b), "two seeded runs differ");
  c.expect(bit_identical(a, r), "kmeans() differs from kmeans_plus_plus + lloyd");

  std::vector<std::vector<double>> pts, ctrs;
  for (const auto& v : points) pts.push_back(v.values);
  for (const auto& v : init) ctrs.push_back(v.values);
  const KMeansOptions opts;
  const auto ref = testing::reference_lloyd(pts, ctrs, opts.max_iterations, opts.tolerance);
  const double gap = std::abs(ref.inertia_history.back() - r.inertia());
  c.expect(gap <= kReferenceInertiaTol, "inertia differs from the reference by " + std::to_string(gap));
  c.expect(ref.assignments == r.assignments, "assignments differ from the reference");

  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << "n=1000 dim=32 k=" << k << ", " << r.iterations << " iterations, |inertia - reference| = " << gap << ", "
    << secs << " s";
  detail = d.str();
}

std::vector<TokenSeq> phrase_corpus(std::size_t total_tokens, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> vocab;
  for (int i = 0; i < 400; ++i) vocab.push_back("w" + std::to_string(i));
  const std::vector<TokenSeq> planted{{"pay", "by", "installments"},
                                      {"too", "expensive"},
                                      {"talk", "to", "my", "wife", "first"},
                                      {"free", "trial", "period"},
                                      {"monthly", "plan"}};
  // Zipf-like word choice gives a spread of supports.
  std::vector<double> weights;
  for (std::size_t i = 0; i < vocab.size(); ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
  std::discrete_distribution<std::size_t> word(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> sent_len(3, 18);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> plant(0, planted.size() - 1);

  std::vector<TokenSeq> corpus;
  std::size_t count = 0;
  while (count < total_tokens) {
    TokenSeq s;
    const std::size_t n = std::min(sent_len(rng), total_tokens - count);
    while (s.size() < n) {
      if (unit(rng) < 0.15) {
        for (const auto& t : planted[plant(rng)]) {
          if (s.size() < n) s.push_back(t);
        }
      } else {
        s.push_back(vocab[word(rng)]);
      }
    }
    count += s.size();
    corpus.push_back(std::move(s));
  }
  return corpus;
}

double direct_significance(double f1, double f2, double f12, double total) {
  return (f12 - f1 * f2 / total) / std::sqrt(std::max(f12, 1.0));
}

void phrase_mining_oracle(Check& c, std::string& detail) {
  const auto corpus = phrase_corpus(10000, 99);
  std::size_t tokens = 0;
  for (const auto& s : corpus) tokens += s.size();
  MiningConfig cfg;
  cfg.min_support = 3;
  const PhraseTable table = mine_frequent_phrases(corpus, cfg);
  const auto brute = testing::brute_force_ngrams(corpus, cfg.max_phrase_len);

  std::map<TokenSeq, std::uint64_t> expected;
  for (const auto& [ngram, n] : brute) {
    if (n >= cfg.min_support) expected.emplace(ngram, n);
  }
  std::map<TokenSeq, std::uint64_t> mined;
  for (const Phrase& p : table.phrases()) mined.emplace(p.tokens, p.support);

  std::size_t unsound = 0, missing = 0, multi = 0;
  for (const auto& [ngram, n] : mined) {
    auto it = expected.find(ngram);
    if (it == expected.end() || it->second != n) ++unsound;
  }
  for (const auto& [ngram, n] : expected) {
    if (!mined.contains(ngram)) ++missing;
    if (ngram.size() > 1) ++multi;
  }
  c.expect(unsound == 0, std::to_string(unsound) + " mined phrases are not frequent n-grams");
  c.expect(missing == 0, std::to_string(missing) + " frequent n-grams were not mined");
  c.expect(table.total_tokens() == tokens, "total token count differs");

  // Every split of every frequent multi-token phrase.
  double worst = 0.0;
  std::size_t evaluated = 0;
  for (const auto& [ngram, n] : expected) {
    for (std::size_t cut = 1; cut < ngram.size(); ++cut) {
      const TokenSeq left(ngram.begin(), ngram.begin() + static_cast<std::ptrdiff_t>(cut));
      const TokenSeq right(ngram.begin() + static_cast<std::ptrdiff_t>(cut), ngram.end());
      const std::uint64_t f1 = brute.at(left), f2 = brute.at(right);
      const double got = significance(f1, f2, n, tokens);
      const double want = direct_significance(static_cast<double>(f1), static_cast<double>(f2),
                                              static_cast<double>(n), static_cast<double>(tokens));
      worst = std::max(worst, std::abs(got - want));
      ++evaluated;
    }
  }
  c.expect(worst <= kSignificanceTol, "significance off by " + std::to_string(worst));

  std::size_t bad_partitions = 0, merged = 0;
  for (const auto& s : corpus) {
    const auto segs = segment(s, table, cfg);
    TokenSeq joined;
    for (const Phrase& p : segs) {
      joined.insert(joined.end(), p.tokens.begin(), p.tokens.end());
      if (p.tokens.size() > 1) {
        ++merged;
        if (!mined.contains(p.tokens)) ++bad_partitions;
      }
    }
    if (joined != s) ++bad_partitions;
  }
  c.expect(bad_partitions == 0, std::to_string(bad_partitions) + " segmentations do not partition their input");

  std::ostringstream d;
  d << tokens << " tokens, " << expected.size() << " frequent n-grams (" << multi << " multi-token), " << evaluated
    << " significance checks, max error " << worst << ", " << merged << " merged segments";
  detail = d.str();
}

void search_exactness(Check& c, std::string& detail) {
  constexpr std::size_t kEntries = 10000, kQueries = 100, kTop = 10, kDim = 256;
  auto vectors = random_unit_vectors(kEntries, kDim, 5);
  // Duplicates force score ties that only the id tie-break can order.
  for (std::size_t i = 0; i < kEntries; i += 37) vectors[i] = vectors[(i * 7919) % kEntries];

  std::vector<IndexEntry> entries(kEntries);
  std::vector<std::vector<double>> raw(kEntries);
  for (std::size_t i = 0; i < kEntries; ++i) {
    entries[i].entry_id = i;
    entries[i].response_text = "r" + std::to_string(i);
    entries[i].vector = vectors[i];
    raw[i] = vectors[i].values;
  }
  const SearchIndex index(std::move(entries));

  auto queries = random_unit_vectors(kQueries, kDim, 6);
  for (std::size_t q = 0; q < kQueries; q += 4) queries[q] = vectors[(q * 131) % kEntries];

  double slowest = 0.0;
  std::size_t mismatched = 0;
  for (std::size_t q = 0; q < kQueries; ++q) {
    const auto t0 = Clock::now();
    const auto hits = index.top_k(queries[q], kTop);
    slowest = std::max(slowest, seconds_since(t0));
    const auto want = testing::brute_force_ranking(raw, queries[q].values, kTop);
    bool same = hits.size() == want.size();
    for (std::size_t i = 0; same && i < hits.size(); ++i) {
      same = hits[i].entry_id == want[i].first && std::abs(hits[i].score - want[i].second) <= kSearchScoreTol;
    }
    if (!same) ++mismatched;
  }
  c.expect(mismatched == 0, std::to_string(mismatched) + " queries differ from the full scan");
  c.expect(slowest < 1.0, "slowest query " + std::to_string(slowest) + " s");
  std::ostringstream d;
  d << kEntries << " entries, " << kQueries << " queries, top-" << kTop << ", slowest query " << slowest * 1e3 << " ms";
  detail = d.str();
}

void sop_oracle(Check& c, std::string& detail) {
  const auto corpus = testing::generate_sop_corpus(2024, 200);
  const auto got = run_rules(corpus.chatlog, corpus.rules);
  c.expect(got == corpus.expected, "execution records differ from the planted plan");
  std::size_t executed = 0;
  for (const auto& e : got) executed += e.executed ? 1 : 0;
  for (DashboardView v : {DashboardView::Trigger, DashboardView::Team, DashboardView::Staff}) {
    const auto stats = aggregate(got, v);
    const auto oracle = testing::brute_force_view(corpus.expected, v);
    const std::string name(to_string(v));
    bool same = stats.rows.size() == oracle.size();
    std::uint64_t total = 0;
    for (std::size_t i = 0; same && i < oracle.size(); ++i) {
      same = stats.rows[i].key == oracle[i].key && stats.rows[i].triggered == oracle[i].triggered &&
             stats.rows[i].executed == oracle[i].executed;
    }
    for (const auto& row : stats.rows) total += row.triggered;
    c.expect(same, name + " view differs from the two-pass count");
    c.expect(total == got.size(), name + " view triggered total is not the record count");
  }
  detail = std::to_string(corpus.chatlog.dialogs.size()) + " dialogs, " + std::to_string(got.size()) + " records, " +
           std::to_string(executed) + " executed";
}

// ---- service ---------------------------------------------------------------

json poll(httplib::Client& client, const std::string& id) {
  for (int i = 0; i < 6000; ++i) {
    auto res = client.Get("/api/tasks/" + id);
    if (res && res->status == 200) {
      json t = json::parse(res->body);
      if (t["status"] == "succeeded" || t["status"] == "failed") return t;
    }
    std::this_thread::sleep_for(10ms);
  }
  return json{{"status", "timeout"}};
}

int status_of(const httplib::Result& r) { return r ? r->status : -1; }

// Every document under the data dir parses as JSON and no temp file is left.
std::size_t torn_documents(const fs::path& root) {
  std::size_t torn = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.find(".tmp-") != std::string::npos) {
      ++torn;
      continue;
    }
    if (e.path().extension() != ".json") continue;
    if (!json::accept(read_file(e.path()))) ++torn;
  }
  return torn;
}

// Child process: serve `data_dir` with one worker and run `kinds` on the
// upload. The hook reports the running task id through `fd` and, when
// `hang` is set, blocks so the parent can kill mid-task.
[[noreturn]] void child_service(const fs::path& data_dir, const std::string& file_id, int fd, bool hang,
                                std::size_t tasks) {
  try {
    ServiceConfig cfg;
    cfg.data_dir = data_dir;
    TaskServiceOptions opts;
    opts.on_task_running = [fd, hang](const Task& t) {
      const std::string line = t.task_id + "\n";
      (void)!::write(fd, line.data(), line.size());
      if (hang) {
        for (;;) ::pause();
      }
    };
    TaskService svc(cfg, opts);
    for (std::size_t i = 0; i < tasks; ++i) {
      svc.start_task(i % 2 ? TaskKind::ObjectionMining : TaskKind::FaqExtraction, file_id);
    }
    svc.wait_idle(600s);
  } catch (...) {
  }
  ::_exit(0);
}

std::string read_line(int fd) {
  std::string line;
  char ch = 0;
  while (::read(fd, &ch, 1) == 1 && ch != '\n') line.push_back(ch);
  return line;
}

void kill_restart(Check& c, std::string& note) {
  testing::TempDir dir;
  const fs::path data = dir / "data";
  const std::string csv = testing::read_fixture("objections.csv");
  std::string file_id;
  {
    Store store(data);
    file_id = store.put_upload(csv, parse_chatlog(csv, "upload"));
  }

  // 1. Kill while a task is held in Running.
  int fds[2];
  if (::pipe(fds) != 0) {
    c.expect(false, "pipe failed");
    return;
  }
  std::cout.flush();
  pid_t pid = ::fork();
  if (pid == 0) {
    ::close(fds[0]);
    child_service(data, file_id, fds[1], true, 1);
  }
  ::close(fds[1]);
  const std::string stuck = read_line(fds[0]);
  ::close(fds[0]);
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
  c.expect(!stuck.empty(), "child never reported a running task");

  // 2. Kill at an arbitrary moment while tasks are being written.
  if (::pipe(fds) != 0) {
    c.expect(false, "pipe failed");
    return;
  }
  pid = ::fork();
  if (pid == 0) {
    ::close(fds[0]);
    child_service(data, file_id, fds[1], false, 12);
  }
  ::close(fds[1]);
  (void)read_line(fds[0]);
  (void)read_line(fds[0]);
  std::this_thread::sleep_for(15ms);
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
  ::close(fds[0]);

  ServiceConfig cfg;
  cfg.data_dir = data;
  TaskService svc(cfg);
  const std::size_t swept = svc.store().removed_temp_files();
  c.expect(torn_documents(data) == 0, "torn documents after restart");
  const auto t = svc.get_task(stuck);
  c.expect(t && t->status == TaskStatus::Failed && t->error_message == std::optional<std::string>{"interrupted"},
           "interrupted task is not Failed/interrupted");
  std::size_t failed = 0;
  for (const Task& task : svc.list_tasks()) {
    if (task.status == TaskStatus::Failed) ++failed;
    if (task.status == TaskStatus::Succeeded) {
      bool readable = false;
      try {
        readable = json::accept(svc.get_result(task.task_id));
      } catch (const std::exception&) {
      }
      c.expect(readable, "succeeded task " + task.task_id + " has no readable result");
    }
  }
  c.expect(svc.wait_idle(120s), "recovered pending tasks did not finish");
  c.expect(torn_documents(data) == 0, "torn documents after recovery");
  note = std::to_string(svc.list_tasks().size()) + " tasks across two kills, " + std::to_string(failed) +
         " marked interrupted, " + std::to_string(swept) + " temp files swept";
}

void service_contract(Check& c, std::string& detail) {
  std::string restart_note;
  // Fork before any service threads exist in this process.
  kill_restart(c, restart_note);

  testing::TempDir dir;
  ServiceConfig cfg;
  cfg.data_dir = dir / "data";
  cfg.workers = 2;
  cfg.max_upload_bytes = 64 * 1024;
  testing::ServiceHarness h(cfg);
  auto client = h.client();

  const std::string faq_csv = testing::read_fixture("faq_dialogs.csv");
  const std::string obj_csv = testing::read_fixture("objections.csv");
  auto up1 = client.Post("/api/chatlogs", faq_csv, "text/csv");
  auto up2 = client.Post("/api/chatlogs", obj_csv, "text/csv");
  c.expect(status_of(up1) == 200 && status_of(up2) == 200, "upload failed");
  if (!c.ok()) return;
  const std::string faq_file = json::parse(up1->body)["file_id"];
  const std::string obj_file = json::parse(up2->body)["file_id"];

  const std::string rules = testing::fixture_path("rules.toml").string();
  struct Job {
    std::string kind, file;
    json config;
    json expected;
  };
  PipelineConfig with_rules;
  with_rules.rules_path = rules;
  const Chatlog obj_chatlog = parse_chatlog(obj_csv);
  std::vector<Job> jobs{
      {"faq_extraction", faq_file, json::object(), json::parse(testing::read_fixture("faq_expected.json"))},
      {"objection_mining", obj_file, json::object(), run_objection_mining(obj_chatlog, PipelineConfig{})},
      {"dashboard", obj_file, json{{"rules_path", rules}}, run_dashboard(obj_chatlog, with_rules)}};
  std::string mining_task;
  for (const Job& j : jobs) {
    auto res = client.Post("/api/tasks", json{{"kind", j.kind}, {"file_id", j.file}, {"config", j.config}}.dump(),
                           "application/json");
    c.expect(status_of(res) == 202, j.kind + ": POST /api/tasks gave " + std::to_string(status_of(res)));
    if (status_of(res) != 202) continue;
    const std::string id = json::parse(res->body)["task_id"];
    const json t = poll(client, id);
    c.expect(t["status"] == "succeeded", j.kind + " did not succeed");
    auto doc = client.Get("/api/tasks/" + id + "/result");
    c.expect(status_of(doc) == 200 && json::parse(doc->body) == j.expected, j.kind + " result differs");
    if (j.kind == "objection_mining") mining_task = id;
  }
  auto hits = client.Get("/api/search?task=" + mining_task + "&q=too%20expensive&k=5");
  c.expect(status_of(hits) == 200 && json::parse(hits->body).size() == 5, "search failed");

  // Error paths.
  c.expect(status_of(client.Post("/api/chatlogs", "a,b\n1,2\n", "text/csv")) == 400, "bad CSV not 400");
  c.expect(status_of(client.Post("/api/tasks", R"({"kind":"nope","file_id":"x"})", "application/json")) == 400,
           "unknown kind not 400");
  c.expect(status_of(client.Get("/api/search?task=" + mining_task + "&q=")) == 400, "empty query not 400");
  c.expect(status_of(client.Post("/api/tasks", json{{"kind", "faq_extraction"}, {"file_id", std::string(64, '0')}}.dump(),
                                 "application/json")) == 404,
           "unknown file not 404");
  c.expect(status_of(client.Get("/api/tasks/missing")) == 404, "unknown task not 404");
  c.expect(status_of(client.Get("/api/tasks/missing/result")) == 404, "unknown result not 404");
  auto no_rules =
      client.Post("/api/tasks", json{{"kind", "dashboard"}, {"file_id", obj_file}}.dump(), "application/json");
  if (status_of(no_rules) == 202) {
    const std::string id = json::parse(no_rules->body)["task_id"];
    c.expect(poll(client, id)["status"] == "failed", "dashboard without rules did not fail");
    c.expect(status_of(client.Get("/api/tasks/" + id + "/result")) == 409, "failed task result not 409");
    c.expect(status_of(client.Get("/api/search?task=" + id + "&q=price")) == 400, "search on dashboard not 400");
  } else {
    c.expect(false, "dashboard POST failed");
  }
  c.expect(status_of(client.Post("/api/chatlogs", std::string(cfg.max_upload_bytes + 1, 'x'), "text/csv")) == 413,
           "oversized upload not 413");

  detail = "3 task kinds end to end, 400/404/409/413 paths; restart: " + restart_note;
}

void determinism(Check& c, std::string& detail) {
  testing::TempDir dir;
  const std::string input = quote(testing::fixture_path("objections.csv"));
  const fs::path a = dir / "a.json", b = dir / "b.json";
  const auto r1 = run_command(cli() + " mine-objections --seed 7 --input " + input + " --out " + quote(a));
  const auto r2 = run_command(cli() + " mine-objections --seed 7 --input " + input + " --out " + quote(b));
  c.expect(r1.status == 0 && r2.status == 0, "CLI failed");
  if (!c.ok()) return;
  const std::string doc = read_file(a);
  c.expect(doc == read_file(b), "two CLI runs differ");

  ServiceConfig cfg;
  cfg.data_dir = dir / "data";
  TaskService svc(cfg);
  const std::string obj = svc.upload_chatlog(testing::read_fixture("objections.csv"));
  const std::string faq = svc.upload_chatlog(testing::read_fixture("faq_dialogs.csv"));
  const std::string t1 = svc.start_task(TaskKind::ObjectionMining, obj, json{{"clustering", {{"seed", 7}}}});
  const std::string t2 = svc.start_task(TaskKind::FaqExtraction, faq);
  const std::string t3 = svc.start_task(TaskKind::Dashboard, obj,
                                        json{{"rules_path", testing::fixture_path("rules.toml").string()}});
  c.expect(svc.wait_idle(120s), "service did not finish");
  try {
    c.expect(svc.get_result(t1) == doc, "service objection document differs from the CLI");
    const auto faq_cli = run_command(cli() + " extract-faq --input " + quote(testing::fixture_path("faq_dialogs.csv")));
    c.expect(svc.get_result(t2) == faq_cli.out, "service FAQ document differs from the CLI");
    const auto dash_cli = run_command(cli() + " dashboard --input " + input + " --rules " +
                                      quote(testing::fixture_path("rules.toml")));
    c.expect(svc.get_result(t3) == dash_cli.out, "service dashboard document differs from the CLI");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  detail = std::to_string(json::parse(doc).size()) + " clusters, " + std::to_string(doc.size()) +
           " bytes; CLI == service for all three kinds";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Check&, std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {"faq-golden", faq_golden},         {"threshold-law", threshold_law},
      {"kmeans-correctness", kmeans_correctness}, {"phrase-mining-oracle", phrase_mining_oracle},
      {"search-exactness", search_exactness},     {"sop-oracle", sop_oracle},
      {"service-contract", service_contract},     {"determinism", determinism},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check c;
    std::string detail;
    try {
      cr.run(c, detail);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok() ? "PASS " : "FAIL ") << cr.name;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << "\n";
    for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::cout << "     - " << c.failures[i] << "\n";
    std::cout.flush();
    if (!c.ok()) ++failed;
  }
  return failed;
}
