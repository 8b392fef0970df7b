// gc2gnn command-line driver.
//
// Exit codes: 0 success / PASS, 1 verification failure / FAIL (witnesses are
// in the report), 2 usage or input error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gc2gnn/compile.hpp"
#include "gc2gnn/harness.hpp"
#include "gc2gnn/refine.hpp"

namespace fs = std::filesystem;
using namespace gc2gnn;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "': file not found or unreadable");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Output {
  std::string dir;

  fs::path resolve(const std::string& name) const {
    fs::path p(name);
    if (p.is_absolute() || dir.empty()) return p;
    return fs::path(dir) / p;
  }

  void write(const std::string& name, const std::string& content) const {
    const fs::path p = resolve(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write '" + p.string() + "'");
    out << content;
  }
};

Formula load_query(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.span.start) + ": " + e.what());
  }
}

LabeledGraph load_graph_file(const std::string& path) {
  try {
    return load_graph(read_file(path));
  } catch (const GraphFormatError& e) {
    throw InputError(path + ": " + e.what());
  }
}

GnnModel load_model_file(const std::string& path) {
  try {
    return load_model(read_file(path));
  } catch (const ModelError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Poly parse_poly(const std::string& csv) {
  std::vector<Rat> coeffs;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) coeffs.push_back(Rat::parse(item));
  if (coeffs.empty()) throw InputError("empty coefficient list");
  return Poly(coeffs);
}

std::vector<uint64_t> parse_uints(const std::string& csv) {
  std::vector<uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

// Corpus specifiers:
//   random:n=<max size>,count=<graphs>,seed=<s>[,p=<edge prob>,colors=<l>]
//   tree:m=<children>,kmax=<max leaves per child>
struct Corpus {
  std::vector<LabeledGraph> graphs;
  std::vector<std::string> names;
};

Corpus make_corpus(const std::string& spec, uint32_t default_colors) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("corpus '" + spec + "': expected <kind>:<key>=<value>,...");
  const std::string kind = spec.substr(0, colon);
  std::map<std::string, std::string> kv;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("corpus '" + spec + "': bad entry '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto num = [&](const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (!fallback) throw InputError("corpus '" + spec + "': missing '" + key + "'");
      return *fallback;
    }
    return it->second;
  };
  Corpus c;
  try {
    if (kind == "random") {
      const uint32_t n = std::stoul(num("n"));
      const size_t count = std::stoul(num("count"));
      const uint64_t seed = std::stoull(num("seed"));
      const double p = std::stod(num("p", "0.3"));
      const uint32_t colors = std::stoul(num("colors", std::to_string(default_colors)));
      if (n == 0) throw InputError("corpus: n must be >= 1");
      std::mt19937_64 rng(seed);
      for (size_t i = 0; i < count; ++i) {
        const uint32_t size = std::uniform_int_distribution<uint32_t>(1, n)(rng);
        c.graphs.push_back(gen_random(size, colors, p, rng()));
        c.names.push_back("random#" + std::to_string(i));
      }
    } else if (kind == "tree") {
      const size_t m = std::stoul(num("m"));
      const uint64_t kmax = std::stoull(num("kmax"));
      std::vector<uint64_t> k(m, 0);
      do {
        std::vector<uint32_t> k32(k.begin(), k.end());
        c.graphs.push_back(with_num_colors(gen_tree(k32), default_colors));
        c.names.push_back("tree" + detail::kvec(k));
      } while (detail::next_tuple(k, kmax));
    } else {
      throw InputError("corpus '" + spec + "': unknown kind '" + kind + "'");
    }
  } catch (const std::logic_error& e) {
    throw InputError("corpus '" + spec + "': " + e.what());
  }
  return c;
}

Json rat_vector_json(const std::vector<Rat>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GC2 queries, GNN compilation and uniform-expressivity checks"};
  app.require_subcommand(1);
  Output out;
  unsigned workers = default_workers();
  app.add_option("--out", out.dir, "Directory for artifacts");
  app.add_option("--workers", workers, "Worker threads (default: GC2GNN_WORKERS or 1)");

  std::string query_path, graph_path, model_path, output_path, corpus, mode, target, preset, poly_path;
  uint32_t colors = 0;
  std::optional<size_t> vertex, rounds;

  auto* parse_cmd = app.add_subcommand("parse", "Parse a query and print its canonical form");
  parse_cmd->add_option("--query", query_path, "Query file")->required();

  auto* rgc_cmd = app.add_subcommand("check-rgc2", "Classify a query against the RGC2 fragment");
  rgc_cmd->add_option("--query", query_path, "Query file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a query on every vertex of a graph");
  eval_cmd->add_option("--query", query_path, "Query file")->required();
  eval_cmd->add_option("--graph", graph_path, "Graph file")->required();

  auto* compile_cmd = app.add_subcommand("compile", "Compile a query to a GNN model");
  compile_cmd->add_option("--target", target, "relu or poly")->required()->check(CLI::IsMember({"relu", "poly"}));
  compile_cmd->add_option("--query", query_path, "Query file")->required();
  compile_cmd->add_option("--colors", colors, "Number of colors")->required();
  compile_cmd->add_option("-o,--output", output_path, "Model file (stdout if omitted)");

  bool dump_trace = false;
  auto* run_cmd = app.add_subcommand("run", "Run a model on a graph");
  run_cmd->add_option("--model", model_path, "Model file")->required();
  run_cmd->add_option("--graph", graph_path, "Graph file")->required();
  mode = "exact";
  run_cmd->add_option("--mode", mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  run_cmd->add_flag("--trace", dump_trace, "Write the full trace to trace.json");

  std::string report_name = "report.json";
  auto* verify_cmd = app.add_subcommand("verify", "Compare model decisions with the query over a corpus");
  verify_cmd->add_option("--model", model_path, "Model file")->required();
  verify_cmd->add_option("--query", query_path, "Query file")->required();
  verify_cmd->add_option("--corpus", corpus, "Corpus specifier")->required();
  verify_cmd->add_option("--report", report_name, "Report file name");

  bool csv = false;
  auto* cr_cmd = app.add_subcommand("cr", "Color refinement trace of a graph");
  cr_cmd->add_option("--graph", graph_path, "Graph file")->required();
  cr_cmd->add_option("--rounds", rounds, "Number of rounds (default: until stable)");
  cr_cmd->add_flag("--csv", csv, "Write cr.csv");

  size_t max_t = 4;
  auto* refines_cmd = app.add_subcommand("refines", "Check that color refinement refines model embeddings");
  refines_cmd->add_option("--model", model_path, "Model file")->required();
  refines_cmd->add_option("--corpus", corpus, "Corpus specifier")->required();
  refines_cmd->add_option("--rounds", max_t, "Check iterations 0..rounds");
  refines_cmd->add_option("--report", report_name, "Report file name");

  size_t m = 3;
  uint64_t kmax = 10, tmax = 20;
  std::string eps = "1/10", u_csv;
  auto* sep_cmd = app.add_subcommand("separate", "Margin sweeps on the tree family");
  sep_cmd->add_option("--model", model_path, "Model file")->required();
  sep_cmd->add_option("--query", query_path, "Query file");
  sep_cmd->add_option("--mode", mode, "box or curve")->required()->check(CLI::IsMember({"box", "curve"}));
  sep_cmd->add_option("--m", m, "Number of children of the root");
  sep_cmd->add_option("--kmax", kmax, "Largest leaf count (box mode)");
  sep_cmd->add_option("--eps", eps, "Margin eps' as a rational");
  sep_cmd->add_option("--u", u_csv, "Direction, comma separated (curve mode; default all ones)");
  sep_cmd->add_option("--tmax", tmax, "Curve parameter range 1..tmax");
  sep_cmd->add_option("--report", report_name, "Report file name");

  std::string sigma_csv = "0,0,1", target_csv;
  auto* realize_cmd = app.add_subcommand("realize-poly", "Build a network realizing a polynomial from an activation");
  realize_cmd->add_option("--sigma", sigma_csv, "Activation coefficients, lowest degree first");
  realize_cmd->add_option("--target", target_csv, "Target coefficients, lowest degree first")->required();
  realize_cmd->add_option("-o,--output", output_path, "Network file (stdout if omitted)");

  size_t arity = 3;
  uint64_t sign_kmax = 5;
  std::string sign_eps = "1";
  auto* sign_cmd = app.add_subcommand("sign-check", "Check the hypercube sign pattern of a polynomial");
  auto* preset_opt = sign_cmd->add_option("--builtin", preset, "literal or hypercube")
                         ->check(CLI::IsMember({"literal", "hypercube"}));
  sign_cmd->add_option("--poly", poly_path, "Polynomial JSON file")->excludes(preset_opt);
  sign_cmd->add_option("--m", arity, "Number of variables (builtins)");
  sign_cmd->add_option("--kmax", sign_kmax, "Largest coordinate");
  sign_cmd->add_option("--eps", sign_eps, "Margin as a rational");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (workers == 0) workers = 1;

  try {
    if (parse_cmd->parsed()) {
      const Formula f = load_query(query_path);
      std::cout << render(f) << "\n";
      std::cout << "depth " << depth(f) << ", desugared depth " << depth(desugar(f)) << "\n";
      return 0;
    }

    if (rgc_cmd->parsed()) {
      const Formula f = desugar(load_query(query_path));
      std::cout << to_string(rgc2_classify(f)) << "\n";
      if (auto bad = rgc2_violation(f)) std::cout << "offending subterm: " << render(*bad) << "\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      const Formula f = load_query(query_path);
      const LabeledGraph g = load_graph_file(graph_path);
      const SatVector sat = eval_all(f, g);
      for (size_t v = 0; v < sat.size(); ++v) std::cout << v << " " << (sat[v] ? 1 : 0) << "\n";
      return 0;
    }

    if (compile_cmd->parsed()) {
      const Formula f = desugar(load_query(query_path));
      const GnnModel model = target == "relu" ? compile_gc2_relu(f, colors) : compile_rgc2_poly(f, colors);
      const std::string text = save_model(model);
      if (output_path.empty()) {
        std::cout << text;
      } else {
        out.write(output_path, text);
        std::cerr << "wrote " << out.resolve(output_path).string() << " (state_dim " << model.state_dim << ")\n";
      }
      return 0;
    }

    if (run_cmd->parsed()) {
      const GnnModel model = load_model_file(model_path);
      const LabeledGraph g = load_graph_file(graph_path);
      if (mode == "exact") {
        const auto trace = run<Rat>(model, g, workers);
        for (size_t v = 0; v < g.size(); ++v) {
          const auto d = apply_rule(model.decision, trace.back()[v][model.output_coord]);
          std::cout << v << " " << to_string(d.verdict) << " " << d.value.str() << "\n";
        }
        if (dump_trace) {
          Json j = Json::array();
          for (const auto& state : trace) {
            Json round = Json::array();
            for (const auto& x : state) round.push_back(rat_vector_json(x));
            j.push_back(std::move(round));
          }
          out.write("trace.json", j.dump(1) + "\n");
        }
      } else {
        const auto trace = run<double>(model, g, workers);
        const double tp = model.decision.theta_plus.to_double(), tm = model.decision.theta_minus.to_double();
        for (size_t v = 0; v < g.size(); ++v) {
          const double o = trace.back()[v][model.output_coord];
          std::cout << v << " " << (o >= tp ? "true" : o <= tm ? "false" : "undecided") << " " << o << "\n";
        }
      }
      return 0;
    }

    if (verify_cmd->parsed()) {
      const GnnModel model = load_model_file(model_path);
      const Formula f = load_query(query_path);
      const Corpus c = make_corpus(corpus, model.num_colors);
      Json disagreements = Json::array();
      size_t checked = 0;
      for (size_t i = 0; i < c.graphs.size(); ++i) {
        const auto& g = c.graphs[i];
        const auto decisions = decide_all(model, g, workers);
        const auto sat = eval_all(f, g);
        for (Vertex v = 0; v < g.size(); ++v, ++checked) {
          const Verdict expect = sat[v] ? Verdict::True : Verdict::False;
          if (decisions[v].verdict != expect)
            disagreements.push_back({{"graph", c.names[i]},
                                     {"graph_text", save_graph(g)},
                                     {"vertex", v},
                                     {"oracle", bool(sat[v])},
                                     {"model", to_string(decisions[v].verdict)},
                                     {"value", decisions[v].value.str()}});
        }
      }
      Json report{{"model", model_path},
                  {"query", render(f)},
                  {"corpus", corpus},
                  {"vertices_checked", checked},
                  {"disagreements", disagreements.size()},
                  {"witnesses", disagreements}};
      out.write(report_name, report.dump(2) + "\n");
      std::cout << (disagreements.empty() ? "PASS" : "FAIL") << ": " << checked << " vertices, "
                << disagreements.size() << " disagreement(s)\n";
      return disagreements.empty() ? 0 : 1;
    }

    if (cr_cmd->parsed()) {
      const LabeledGraph g = load_graph_file(graph_path);
      const auto tr = color_refine(g, rounds);
      for (size_t t = 0; t < tr.rounds.size(); ++t) std::cout << "round " << t << ": " << tr.class_count(t) << " classes\n";
      if (tr.stable_round) std::cout << "stable at round " << *tr.stable_round << "\n";
      if (csv) out.write("cr.csv", trace_to_csv(tr));
      return 0;
    }

    if (refines_cmd->parsed()) {
      const GnnModel model = load_model_file(model_path);
      const Corpus c = make_corpus(corpus, model.num_colors);
      Json witnesses = Json::array();
      size_t pairs = 0;
      // Consecutive corpus graphs are checked as disjoint unions.
      for (size_t i = 0; i < c.graphs.size(); ++i) {
        const LabeledGraph g = i + 1 < c.graphs.size() ? disjoint_union(c.graphs[i], c.graphs[i + 1]) : c.graphs[i];
        const auto tr = color_refine(g, max_t);
        const auto trace = run<Rat>(model, g, workers, model.recurrent ? std::optional(max_t) : std::nullopt);
        for (size_t t = 0; t <= std::min(max_t, trace.size() - 1); ++t) {
          std::map<Vertex, ClassId> fine;
          std::map<Vertex, std::vector<Rat>> coarse;
          for (Vertex v = 0; v < g.size(); ++v) fine[v] = tr.rounds[t][v], coarse[v] = trace[t][v];
          ++pairs;
          const auto r = check_refines(fine, coarse);
          if (!r.ok)
            witnesses.push_back({{"graph", save_graph(g)},
                                 {"iteration", t},
                                 {"u", r.witness->first},
                                 {"v", r.witness->second},
                                 {"xi_u", rat_vector_json(coarse[r.witness->first])},
                                 {"xi_v", rat_vector_json(coarse[r.witness->second])}});
        }
      }
      Json report{{"model", model_path}, {"corpus", corpus}, {"checks", pairs}, {"violations", witnesses.size()},
                  {"witnesses", witnesses}};
      out.write(report_name, report.dump(2) + "\n");
      std::cout << (witnesses.empty() ? "PASS" : "FAIL") << ": " << pairs << " (graph, iteration) checks, "
                << witnesses.size() << " violation(s)\n";
      return witnesses.empty() ? 0 : 1;
    }

    if (sep_cmd->parsed()) {
      const GnnModel model = load_model_file(model_path);
      std::optional<Formula> query;
      if (!query_path.empty()) query = load_query(query_path);
      const std::string stem = fs::path(report_name).stem().string();
      if (mode == "box") {
        BoxOptions opt;
        opt.eps_prime = Rat::parse(eps);
        opt.keep_points = false;
        opt.workers = workers;
        opt.model_name = model_path;
        const fs::path csv_path = out.resolve(stem + ".csv");
        if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
        std::ofstream csv_out(csv_path, std::ios::binary);
        if (!csv_out) throw InputError("cannot write '" + csv_path.string() + "'");
        csv_out << csv_header(m);
        opt.on_point = [&](const MarginPoint& p) { csv_out << csv_row(p); };
        const MarginReport r = box_margin(model, query, m, kmax, opt);
        out.write(report_name, report_to_json(r).dump(2) + "\n");
        std::cout << r.verdict_text << "\n";
        return r.verdict == MarginVerdict::Fail ? 1 : 0;
      }
      std::vector<uint64_t> u = u_csv.empty() ? std::vector<uint64_t>(m, 1) : parse_uints(u_csv);
      std::vector<uint64_t> ts(tmax);
      std::iota(ts.begin(), ts.end(), 1);
      const auto rows = curve_sweep(model, u, ts);
      Json report{{"model", model_path}, {"query", query ? render(*query) : ""}, {"u", u}, {"rows", curve_to_json(rows)}};
      out.write(report_name, report.dump(2) + "\n");
      out.write(stem + ".csv", curve_to_csv(rows));
      for (const auto& row : rows) std::cout << "t=" << row.t << " difference " << row.difference.str() << "\n";
      return 0;
    }

    if (realize_cmd->parsed()) {
      const Poly sigma = parse_poly(sigma_csv), tgt = parse_poly(target_csv);
      const PolyNetwork net = realize_polynomial(sigma, tgt);
      const PolyCertificate cert = certify(net, tgt);
      Json j = network_to_json(net);
      j["certificate"] = {{"ok", cert.ok}, {"points_checked", cert.points.size()}, {"identity_holds", cert.identity_holds}};
      if (output_path.empty()) std::cout << j.dump(2) << "\n";
      else out.write(output_path, j.dump(2) + "\n");
      std::cerr << (cert.ok ? "certified" : "certificate FAILED") << ": depth " << net.depth() << "\n";
      return cert.ok ? 0 : 1;
    }

    if (sign_cmd->parsed()) {
      MultiPoly p(arity);
      if (!poly_path.empty()) {
        // {"arity": m, "terms": [{"exp": [..], "coeff": "p/q"}, ...]}
        const Json j = Json::parse(read_file(poly_path));
        p = MultiPoly(j.at("arity").get<size_t>());
        for (const auto& t : j.at("terms")) p.add_term(t.at("exp").get<std::vector<unsigned>>(), detail::rat_from_json(t.at("coeff"), "/terms"));
      } else if (preset == "literal") {
        p = literal_sign_poly(arity);
      } else {
        p = hypercube_indicator_poly(arity);
      }
      const auto r = sign_check(p, sign_kmax, Rat::parse(sign_eps));
      Json report{{"ok", r.ok}, {"points_checked", r.points_checked}, {"symmetry_reduced", r.symmetry_reduced}};
      if (!r.ok) report["witness"] = {{"point", r.witness}, {"value", r.value.str()}, {"branch", r.branch}};
      out.write(report_name == "report.json" ? "sign_check.json" : report_name, report.dump(2) + "\n");
      if (r.ok) {
        std::cout << "PASS: sign pattern holds on {0.." << sign_kmax << "}^" << p.arity() << "\n";
        return 0;
      }
      std::cout << "FAIL: witness " << detail::kvec(r.witness) << " value " << r.value.str() << " (" << r.branch << ")\n";
      return 1;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
