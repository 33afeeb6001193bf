#include <csignal>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <httplib.h>

#include "provex/analysis.hpp"
#include "provex/dot.hpp"
#include "provex/error.hpp"
#include "provex/explain.hpp"
#include "provex/graph_json.hpp"
#include "provex/htn/plan_json.hpp"
#include "provex/htn/planner.hpp"
#include "provex/mapping.hpp"
#include "provex/service.hpp"

namespace {

using namespace provex;
using nlohmann::json;

constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kNotFound = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unsolvable:
    case ErrorCode::DepthExceeded:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownSource:
    case ErrorCode::UnknownClass: return kNotFound;
    default: return kValidation;
  }
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + output);
  out << text;
}

void emit(const json& document, const std::string& output) { emit(document.dump(2) + "\n", output); }

struct OverlayFlags {
  std::vector<std::string> refute;
  std::vector<std::string> refute_class;
  std::vector<std::string> set_confidence;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--refute", refute, "Node ids to refute");
    cmd->add_option("--refute-class", refute_class, "Class selectors DIM:KEY to refute");
    cmd->add_option("--set-confidence", set_confidence, "Confidence overrides ID=X");
  }

  Overlay build(const Analysis& analysis) const {
    Overlay overlay;
    overlay.refuted.insert(refute.begin(), refute.end());
    for (const auto& selector : refute_class) {
      const auto members = resolve_selector(analysis.catalog(), selector);
      overlay.refuted.insert(members.begin(), members.end());
    }
    for (const auto& item : set_confidence) {
      const auto eq = item.rfind('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--set-confidence expects ID=X, got " + item);
      std::size_t used = 0;
      double value = 0;
      try {
        value = std::stod(item.substr(eq + 1), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size() - eq - 1) throw UsageError("not a number in " + item);
      overlay.confidence_overrides[item.substr(0, eq)] = value;
    }
    check_overlay(analysis.graph(), overlay);
    return overlay;
  }
};

Analysis load_analysis(const std::string& path) {
  return Analysis(std::make_shared<const ProvGraph>(graph_from_json(read_json_file(path))));
}

volatile std::sig_atomic_t g_stop = 0;
httplib::Server* g_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan provenance: planning, conversion, explanation and serving"};
  app.require_subcommand(1);

  // plan
  std::string domain_path, problem_path, output;
  std::optional<std::size_t> all_plans;
  auto* plan = app.add_subcommand("plan", "Run the HTN planner");
  plan->add_option("--domain", domain_path)->required();
  plan->add_option("--problem", problem_path)->required();
  plan->add_option("--all-plans", all_plans, "Return up to N plans");
  plan->add_option("-o,--output", output);

  // convert
  std::string plans_path, appraisals_path, report_path;
  auto* convert = app.add_subcommand("convert", "Map plans to a provenance graph");
  convert->add_option("--plans", plans_path)->required();
  convert->add_option("--problem", problem_path)->required();
  convert->add_option("--appraisals", appraisals_path);
  convert->add_option("--report", report_path, "Write the mapping report here");
  convert->add_option("-o,--output", output);

  // query
  std::string graph_path, kind_text;
  std::vector<std::string> focus;
  double threshold = 0.0;
  OverlayFlags overlay_flags;
  auto* query = app.add_subcommand("query", "Answer one question about a graph");
  query->add_option("--graph", graph_path)->required();
  query->add_option("--kind", kind_text)
      ->required()
      ->check(CLI::IsMember({"why", "reliability", "sensitivity", "impact", "pertinence", "assumptions", "replan"}));
  query->add_option("--focus", focus)->required();
  query->add_option("--threshold", threshold);
  overlay_flags.add_to(query);

  // export-dot
  auto* dot = app.add_subcommand("export-dot", "Render a graph as Graphviz DOT");
  dot->add_option("--graph", graph_path)->required();
  dot->add_option("-o,--output", output);
  overlay_flags.add_to(dot);

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  ServiceOptions service_options;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--graph", graph_path, "Graph to preload as g1");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--max-nodes", service_options.max_nodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*plan) {
      const auto domain = htn::load_domain(read_json_file(domain_path));
      const auto problem = htn::load_problem(read_json_file(problem_path));
      std::vector<htn::PlanTree> plans;
      if (all_plans) {
        plans = htn::all_plans(domain, problem, *all_plans);
        if (plans.empty() && *all_plans > 0) throw Error(ErrorCode::Unsolvable, "no plan achieves the problem's tasks");
      } else {
        plans.push_back(htn::seek_plan(domain, problem));
      }
      emit(htn::plans_to_json(plans), output);
    } else if (*convert) {
      const auto plans = htn::plans_from_json(read_json_file(plans_path));
      const auto problem = htn::load_problem(read_json_file(problem_path));
      const auto appraisals =
          appraisals_path.empty() ? std::vector<Appraisal>{} : appraisals_from_json(read_json_file(appraisals_path));
      const auto result = plan_to_prov(plans, problem, appraisals);
      emit(to_json(result.graph), output);
      if (!report_path.empty()) write_json_file(report_path, to_json(result.report));
    } else if (*query) {
      const auto analysis = load_analysis(graph_path);
      const auto overlay = overlay_flags.build(analysis);
      const Question question{*parse_question_kind(kind_text), focus, threshold};
      emit(to_json(answer(analysis, overlay, question)), "");
    } else if (*dot) {
      const auto analysis = load_analysis(graph_path);
      emit(export_dot(analysis, overlay_flags.build(analysis)), output);
    } else if (*serve) {
      Service service(service_options);
      if (!graph_path.empty()) {
        const auto id = service.add_graph(graph_from_json(read_json_file(graph_path)));
        std::cerr << "loaded " << graph_path << " as " << id << "\n";
      }
      httplib::Server server;
      service.bind(server);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        g_stop = 1;
        if (g_server) g_server->stop();
      });
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        if (g_stop) return 0;
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kUsage;
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v.rule << " " << v.subject << ": " << v.message << "\n";
    return kValidation;
  } catch (const HttpError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: Parse: " << e.what() << "\n";
    return kValidation;
  }
  return 0;
}
