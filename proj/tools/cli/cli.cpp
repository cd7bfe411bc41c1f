#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "cli/table.hpp"
#include "salesmine/config.hpp"
#include "salesmine/documents.hpp"
#include "salesmine/pipelines.hpp"
#include "salesmine/store.hpp"
#include "salesmine/task_service.hpp"

namespace salesmine::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Chatlog load_chatlog(const std::string& path) { return parse_chatlog(read_input(path), path, now_instant()); }

void emit(const std::string& bytes, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << bytes;
    out.flush();
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + out_path);
  f << bytes;
  if (!f.flush()) throw Error("cannot write " + out_path);
}

struct Options {
  std::string config_path;
  std::string input;
  std::string out;
  std::string format = "json";
  bool stats = false;
  std::optional<std::size_t> window;
  std::optional<double> threshold;
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::string rules;
  std::string view;
  std::string index;
  std::string query;
  std::size_t top_k = 10;
};

ServiceConfig base_config(const Options& o) {
  if (o.config_path.empty()) return ServiceConfig{};
  return load_service_config(o.config_path);
}

std::string render_as(const nlohmann::json& doc, const std::string& format,
                      std::string (*table)(const nlohmann::json&)) {
  if (format == "table") return table(doc);
  return render_document(doc);
}

int serve(const Options& o, std::ostream& out, std::ostream& err) {
  const ServiceConfig config = base_config(o);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  TaskService service(config);
  if (!service.bind(config.host, config.port)) {
    err << "salesmine: cannot bind " << config.host << ":" << config.port << "\n";
    return kDataError;
  }
  out << "salesmine listening on http://" << config.host << ":" << config.port << " (data in "
      << config.data_dir.string() << ")" << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.listen_after_bind();
  // Wake the waiter if the server stopped on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"salesmine: mine FAQ pairs, objection clusters and SOP dashboards from sales chatlogs", "salesmine"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config_path, "Config file (JSON, same format as serve); flags override it")
      ->check(CLI::ExistingFile);

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  };

  auto* ingest = app.add_subcommand("ingest", "Parse and validate a CSV chatlog");
  ingest->add_option("--input", o.input, "Chatlog CSV")->required();
  ingest->add_flag("--stats", o.stats, "Print summary counts instead of the parsed chatlog");
  ingest->add_option("--out", o.out, "Output file (default stdout)");
  add_format(ingest);

  auto* faq = app.add_subcommand("extract-faq", "Extract FAQ question-answer pairs");
  faq->add_option("--input", o.input, "Chatlog CSV")->required();
  faq->add_option("--out", o.out, "Result document (default stdout)");
  faq->add_option("--window", o.window, "Snippet window r (question + r-1 followers)")->check(CLI::Range(2, 1000));
  faq->add_option("--threshold", o.threshold, "Answer score threshold")->check(CLI::Range(0.0, 1.0));
  add_format(faq);

  auto* mine = app.add_subcommand("mine-objections", "Cluster customer objections with sales responses");
  mine->add_option("--input", o.input, "Chatlog CSV")->required();
  mine->add_option("--out", o.out, "Result document (default stdout)");
  mine->add_option("--k", o.k, "Number of clusters (default: heuristic)")->check(CLI::PositiveNumber);
  mine->add_option("--seed", o.seed, "k-means++ seed");
  add_format(mine);

  auto* dash = app.add_subcommand("dashboard", "Evaluate SOP rules and aggregate execution ratios");
  dash->add_option("--input", o.input, "Chatlog CSV")->required();
  dash->add_option("--rules", o.rules, "Rule set file")->required()->check(CLI::ExistingFile);
  dash->add_option("--out", o.out, "Result document (default stdout)");
  dash->add_option("--view", o.view, "Only this view")->check(CLI::IsMember({"trigger", "team", "staff"}));
  add_format(dash);

  auto* search = app.add_subcommand("search", "Search mined sales responses");
  search->add_option("--index", o.index, "mine-objections result document")->required()->check(CLI::ExistingFile);
  search->add_option("--query", o.query, "Customer objection text")->required();
  search->add_option("--top-k", o.top_k, "Number of hits")->check(CLI::PositiveNumber);
  search->add_option("--out", o.out, "Output file (default stdout)");
  add_format(search);

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP task service");
  serve_cmd->add_option("--config", o.config_path, "Service config file")->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  argv.push_back("salesmine");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "salesmine: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (serve_cmd->parsed()) return serve(o, out, err);

    ServiceConfig config = base_config(o);
    PipelineConfig& pipeline = config.pipeline;
    if (o.window) pipeline.qa.window = *o.window;
    if (o.threshold) pipeline.scorer.answer_threshold = *o.threshold;
    if (o.k) pipeline.clustering.k = *o.k;
    if (o.seed) pipeline.clustering.seed = *o.seed;
    if (!o.rules.empty()) pipeline.rules_path = o.rules;

    if (ingest->parsed()) {
      const Chatlog chatlog = load_chatlog(o.input);
      if (o.stats) {
        emit(render_as(to_json(dialog_stats(chatlog)), o.format, stats_table), o.out, out);
      } else {
        emit(render_document(to_json(chatlog)), o.out, out);
      }
    } else if (faq->parsed()) {
      emit(render_as(run_faq_extraction(load_chatlog(o.input), pipeline), o.format, faq_table), o.out, out);
    } else if (mine->parsed()) {
      emit(render_as(run_objection_mining(load_chatlog(o.input), pipeline), o.format, clusters_table), o.out, out);
    } else if (dash->parsed()) {
      std::optional<DashboardView> only;
      if (!o.view.empty()) only = parse_dashboard_view(o.view);
      emit(render_as(run_dashboard(load_chatlog(o.input), pipeline, only), o.format, dashboard_table), o.out, out);
    } else if (search->parsed()) {
      const auto scorer = make_scorer(pipeline.scorer);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_input(o.index));
      } catch (const nlohmann::json::exception& e) {
        throw Error(o.index + " is not valid JSON: " + e.what());
      }
      const SearchIndex index = index_from_document(doc, *scorer);
      const auto hits = salesmine::search(index, o.query, o.top_k, *scorer);
      emit(render_as(to_json(index, hits), o.format, hits_table), o.out, out);
    }
    return kOk;
  } catch (const RemoteUnavailable& e) {
    err << "salesmine: " << e.what() << "\n";
    return kRemoteError;
  } catch (const EmptyQuery& e) {
    err << "salesmine: " << e.what() << "\n";
    return kUsage;
  } catch (const IngestError& e) {
    err << "salesmine: " << o.input << ": " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "salesmine: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace salesmine::cli
