#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtwalk/errors.hpp"
#include "qtwalk/fixture.hpp"
#include "qtwalk/format.hpp"
#include "qtwalk/graph.hpp"
#include "qtwalk/kgrc_converter.hpp"
#include "qtwalk/manifest.hpp"
#include "qtwalk/pipeline.hpp"
#include "qtwalk/skipgram.hpp"
#include "qtwalk/turtle_star.hpp"
#include "qtwalk/walks.hpp"

using namespace qtwalk;

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::string expand_predicate(const std::string& p) {
  if (p == "a" || p == "rdf:type") return std::string(kRdfType);
  if (p.size() > 2 && p.front() == '<' && p.back() == '>') return p.substr(1, p.size() - 2);
  return p;
}

std::vector<std::string> expand_predicates(const std::vector<std::string>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(expand_predicate(p));
  return out;
}

EvalTasks parse_tasks(const std::vector<std::string>& names) {
  if (names.empty()) return {};
  EvalTasks t{false, false, false, false};
  for (const auto& n : names) {
    if (n == "classification") t.classification = true;
    else if (n == "clustering") t.clustering = true;
    else if (n == "relatedness") t.relatedness = true;
    else if (n == "similarity") t.similarity = true;
    else throw InputError("unknown task '" + n + "'");
  }
  return t;
}

struct WalkFlags {
  std::string strategy = "mid";
  std::size_t walks = 100;
  std::size_t depth = 8;
  double alpha = 0.5;
  double beta = 0.5;
  std::uint64_t seed = 42;
  std::vector<std::string> exclude;
  unsigned threads = 1;

  void add(CLI::App* app) {
    app->add_option("--strategy", strategy, "Walk strategy")
        ->check(CLI::IsMember({"random", "mid"}))
        ->capture_default_str();
    app->add_option("--walks", walks, "Walks per node")->capture_default_str();
    app->add_option("--depth", depth, "Walk depth")->capture_default_str();
    app->add_option("--alpha", alpha, "Probability of entering a quoted triple's subject")
        ->capture_default_str();
    app->add_option("--beta", beta, "Probability of climbing from an object to its quoted triple")
        ->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--exclude-predicate", exclude,
                    "Drop triples with this predicate before walking (repeatable; 'a' for rdf:type)");
    app->add_option("--threads", threads, "Worker threads")->capture_default_str();
  }

  WalkParams params() const {
    WalkParams p;
    p.strategy = parse_walk_strategy(strategy);
    p.n = walks;
    p.d = depth;
    p.alpha = alpha;
    p.beta = beta;
    p.seed = seed;
    return p;
  }
};

struct TrainFlags {
  std::size_t dim = 100;
  int window = 5;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double lr = 0.025;
  std::uint64_t min_count = 1;
  std::string mode = "classic";
  std::string softmax = "negative-sampling";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void add(CLI::App* app, bool with_seed) {
    app->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
    app->add_option("--window", window, "Context window")->capture_default_str();
    app->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    app->add_option("--negatives", negatives, "Negative samples per pair")->capture_default_str();
    app->add_option("--lr", lr, "Initial learning rate")->capture_default_str();
    app->add_option("--min-count", min_count, "Minimum token count")->capture_default_str();
    app->add_option("--mode", mode, "Skip-gram variant")
        ->check(CLI::IsMember({"classic", "structured"}))
        ->capture_default_str();
    app->add_option("--softmax", softmax, "Training objective")
        ->check(CLI::IsMember({"negative-sampling", "full"}))
        ->capture_default_str();
    if (with_seed) app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--train-seed", seed, "Training seed")->capture_default_str();
    app->add_option("--train-threads", threads,
                    "Training threads (more than one is not reproducible)")
        ->capture_default_str();
  }

  TrainConfig config() const {
    TrainConfig c;
    c.dim = dim;
    c.window = window;
    c.epochs = epochs;
    c.negatives = negatives;
    c.learning_rate = lr;
    c.min_count = min_count;
    c.mode = parse_skipgram_mode(mode);
    c.softmax = softmax == "full" ? SoftmaxMode::FullSoftmax : SoftmaxMode::NegativeSampling;
    c.seed = seed;
    c.threads = threads;
    return c;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("bad number in list: '" + item + "'");
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"RDF-star graph walks, skip-gram embeddings and evaluation"};
  app.require_subcommand(1);

  std::string in_path, out_path, report_path, gold_dir;

  auto* convert = app.add_subcommand("convert", "Convert a reified scene graph to RDF-star");
  bool link_to_inner = false;
  convert->add_option("input", in_path, "Reified Turtle file")->required();
  convert->add_option("-o,--output", out_path, "RDF-star output (.ttls)")->required();
  convert->add_option("--report", report_path, "Conversion report (TSV)");
  convert->add_flag("--link-to-inner", link_to_inner,
                    "Point scene links at the bare quoted triple instead of the id wrapper");

  auto* stats = app.add_subcommand("stats", "Graph statistics as TSV");
  bool include_ids = false;
  stats->add_option("input", in_path, "RDF-star file")->required();
  stats->add_option("-o,--output", out_path, "Output TSV (default stdout)");
  stats->add_flag("--include-id-nesting", include_ids,
                  "Count quoted triples introduced by id wrappers");

  WalkFlags walk_flags;
  auto* walk = app.add_subcommand("walk", "Generate a walk corpus");
  walk->add_option("input", in_path, "RDF-star file")->required();
  walk->add_option("-o,--output", out_path, "Corpus file")->required();
  walk_flags.add(walk);

  TrainFlags train_flags;
  bool with_outputs = false;
  auto* trainc = app.add_subcommand("train", "Train embeddings from a walk corpus");
  trainc->add_option("input", in_path, "Corpus file")->required();
  trainc->add_option("-o,--output", out_path, "Embedding file")->required();
  trainc->add_flag("--with-outputs", with_outputs, "Also write the output matrices");
  train_flags.add(trainc, true);

  std::vector<std::string> task_names;
  bool allow_leak = false;
  std::uint64_t eval_seed = 7;
  auto* evalc = app.add_subcommand("eval", "Evaluate embeddings against gold standards");
  evalc->add_option("input", in_path, "Embedding file")->required();
  evalc->add_option("--gold", gold_dir, "Directory with gold files")->required();
  evalc->add_option("-o,--output", out_path, "Report TSV (default stdout)");
  evalc->add_option("--tasks", task_names,
                    "classification, clustering, relatedness, similarity (default all)")
      ->delimiter(',');
  evalc->add_flag("--allow-leak", allow_leak,
                  "Run classification even if type triples were not removed");
  evalc->add_option("--eval-seed", eval_seed, "Seed for folds and k-means")->capture_default_str();

  WalkFlags sweep_walk;
  TrainFlags sweep_train;
  std::string alphas, betas, depths, seeds = "42";
  auto* sweep = app.add_subcommand("sweep", "Evaluate a grid of walk parameters");
  sweep->add_option("input", in_path, "RDF-star file")->required();
  sweep->add_option("--gold", gold_dir, "Directory with gold files")->required();
  sweep->add_option("-o,--output", out_path, "Output TSV (default stdout)");
  sweep->add_option("--alphas", alphas, "Comma-separated alpha values");
  sweep->add_option("--betas", betas, "Comma-separated beta values");
  sweep->add_option("--depths", depths, "Comma-separated depths");
  sweep->add_option("--seeds", seeds, "Comma-separated walk seeds")->capture_default_str();
  sweep->add_option("--tasks", task_names, "Tasks to run (default all)")->delimiter(',');
  sweep->add_option("--eval-seed", eval_seed, "Seed for folds and k-means")->capture_default_str();
  std::vector<std::string> metric_names;
  sweep->add_option("--metric", metric_names,
                    "Only report these metrics, as 'metric' or 'task/metric' (repeatable)")
      ->delimiter(',');
  sweep->add_flag("--allow-leak", allow_leak,
                  "Run classification even if type triples are not excluded");
  sweep_walk.add(sweep);
  sweep_train.add(sweep, false);

  FixtureOptions fixture_options;
  auto* fixture = app.add_subcommand("gen-fixture", "Write a synthetic scene graph with gold files");
  fixture->add_option("-o,--output", out_path, "Output directory")->required();
  fixture->add_option("--seed", fixture_options.seed, "Random seed")->capture_default_str();
  fixture->add_option("--scenes", fixture_options.scenes, "Number of scenes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*convert) {
    const auto triples = read_document_file(in_path);
    kgrc::ConverterOptions options;
    options.link_to_wrapper = !link_to_inner;
    const auto result = kgrc::convert_kgrc(triples, options);
    write_document_file(out_path, result.triples);
    if (!report_path.empty()) write_output(report_path, result.report.to_tsv());
    std::cerr << "converted " << result.report.scenes_converted << " scenes, "
              << result.report.dropped_scenes.size() << " dropped\n";
    return 0;
  }
  if (*stats) {
    const Graph g = build_graph(read_document_file(in_path));
    StatsOptions options;
    options.include_id_nesting = include_ids;
    write_output(out_path, stats_to_tsv(compute_stats(g, options)));
    return 0;
  }
  if (*walk) {
    const auto excluded = expand_predicates(walk_flags.exclude);
    const auto triples = exclude_predicates(read_document_file(in_path), excluded);
    const Graph g = build_graph(triples);
    const auto corpus = generate_corpus(g, walk_flags.params(), walk_flags.threads);
    write_corpus(out_path, corpus);
    write_manifest(out_path, walk_manifest(corpus, excluded));
    return 0;
  }
  if (*trainc) {
    const auto corpus = read_corpus(in_path);
    const auto cfg = train_flags.config();
    const auto vocab = build_vocabulary(corpus, cfg.min_count);
    const auto model = train(corpus, vocab, cfg);
    save_embeddings(model, out_path, with_outputs);
    write_manifest(out_path, train_manifest(read_manifest(in_path), cfg));
    return 0;
  }
  if (*evalc) {
    const auto tasks = parse_tasks(task_names);
    const auto model = load_embeddings(in_path);
    const auto manifest = read_manifest(in_path);
    const bool clean = type_triples_excluded(manifest);
    if (tasks.classification && !clean && !allow_leak) {
      throw InputError(
          "refusing to run classification: the embeddings were not trained with "
          "rdf:type triples excluded (walk --exclude-predicate a); pass --allow-leak "
          "to override");
    }
    EvalOptions options;
    options.seed = eval_seed;
    options.leak_guard = clean ? "type-triples-removed"
                               : (allow_leak ? "allowed-leak" : "type-triples-kept");
    write_output(out_path, evaluate(model, load_gold_dir(gold_dir), options, tasks).to_tsv());
    return 0;
  }
  if (*sweep) {
    const auto tasks = parse_tasks(task_names);
    const auto triples = read_document_file(in_path);
    const auto gold = load_gold_dir(gold_dir);
    auto base_alpha = alphas.empty() ? std::vector<double>{sweep_walk.alpha} : parse_list(alphas);
    auto base_beta = betas.empty() ? std::vector<double>{sweep_walk.beta} : parse_list(betas);
    auto depth_list = depths.empty() ? std::vector<double>{static_cast<double>(sweep_walk.depth)}
                                     : parse_list(depths);
    const auto seed_list = parse_list(seeds);
    PipelineConfig config;
    config.train = sweep_train.config();
    config.exclude_predicates = expand_predicates(sweep_walk.exclude);
    config.walk_threads = sweep_walk.threads;
    config.eval.seed = eval_seed;
    if (tasks.classification && !allow_leak &&
        !type_triples_excluded(walk_manifest(WalkCorpus{}, config.exclude_predicates))) {
      throw InputError(
          "refusing to run classification without --exclude-predicate a; pass "
          "--allow-leak to override");
    }
    const auto selected = [&](const ReportRow& row) {
      if (metric_names.empty()) return true;
      for (const auto& m : metric_names) {
        if (m == row.metric || m == row.task + "/" + row.metric) return true;
      }
      return false;
    };
    std::string out = "alpha\tbeta\tdepth\tseed\ttask\tmetric\tvalue\n";
    for (const double a : base_alpha) {
      for (const double b : base_beta) {
        for (const double d : depth_list) {
          if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) {
            throw InputError("depths must be positive integers");
          }
          for (const double s : seed_list) {
            config.walk = sweep_walk.params();
            config.walk.alpha = a;
            config.walk.beta = b;
            config.walk.d = static_cast<std::size_t>(d);
            config.walk.seed = static_cast<std::uint64_t>(s);
            const auto result = run_pipeline(triples, config, gold, tasks);
            for (const auto& row : result.report.rows) {
              if (!selected(row)) continue;
              out += format_double(a) + "\t" + format_double(b) + "\t" +
                     std::to_string(config.walk.d) + "\t" +
                     std::to_string(config.walk.seed) + "\t" + row.task + "\t" +
                     row.metric + "\t" + row.value + "\n";
            }
          }
        }
      }
    }
    write_output(out_path, out);
    return 0;
  }
  if (*fixture) {
    write_fixture(out_path, generate_fixture(fixture_options));
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    const auto& d = e.diagnostics();
    std::cerr << "error: " << to_string(d.kind) << " at line " << d.line << ", column "
              << d.column << ": " << d.message << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
