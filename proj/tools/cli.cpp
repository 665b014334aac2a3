#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "peerlex/config.hpp"
#include "peerlex/corpus.hpp"
#include "peerlex/embeddings.hpp"
#include "peerlex/errors.hpp"
#include "peerlex/genclient.hpp"
#include "peerlex/lexicon.hpp"
#include "peerlex/metrics.hpp"
#include "peerlex/report.hpp"
#include "peerlex/scorers.hpp"

namespace peerlex::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
  std::string config;
  std::string posts;
  std::string responses;
  std::string lexicon;
  std::string embeddings;
  std::string embeddings_format;
  std::vector<std::string> models;
  std::string scorer;
  std::string out;
  std::optional<int> workers;
  std::string format;
  std::string measures;
  // subcommand options
  std::string endpoint;
  std::string table = "all";
  std::optional<std::size_t> bins;
};

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.posts.empty()) c.paths.posts = f.posts;
  if (!f.responses.empty()) c.paths.responses = f.responses;
  if (!f.lexicon.empty()) c.paths.lexicon = f.lexicon;
  if (!f.embeddings.empty()) c.paths.embeddings = f.embeddings;
  if (!f.embeddings_format.empty()) c.paths.embeddings_format = f.embeddings_format;
  if (!f.scorer.empty()) c.scorer = f.scorer;
  if (!f.out.empty()) c.paths.out = f.out;
  if (!f.measures.empty()) c.paths.measures = f.measures;
  if (!f.format.empty()) c.format = report::parse_format(f.format);
  if (f.workers) {
    if (*f.workers < 1) throw InputError("--workers must be >= 1");
    c.workers = *f.workers;
    c.generation.workers = *f.workers;
  }
  if (!f.endpoint.empty()) c.generation.endpoint_url = f.endpoint;
  if (f.bins) c.histogram_bins = *f.bins;
  if (f.models.size() == 1) c.model = f.models.front();
  if (!f.models.empty()) c.models = f.models;
  if (c.workers < 1) throw InputError("workers must be >= 1");
  c.report.workers = c.workers;
  return c;
}

void require(const fs::path& path, const std::string& what) {
  if (path.empty()) throw InputError("missing input: " + what + " (no path given)");
  std::error_code ec;
  if (!fs::exists(path, ec)) throw InputError("missing input: " + what + " '" + path.string() + "' does not exist");
}

std::vector<fs::path> response_files(const RunConfig& c) {
  std::vector<fs::path> out;
  const std::string raw = c.paths.responses.string();
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto comma = raw.find(',', start);
    if (comma == std::string::npos) comma = raw.size();
    std::string item = raw.substr(start, comma - start);
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.emplace_back(item.substr(b, e - b + 1));
    start = comma + 1;
  }
  return out;
}

Corpus load_inputs(const RunConfig& c, bool need_responses) {
  require(c.paths.posts, "posts file");
  const auto files = response_files(c);
  if (need_responses && files.empty()) throw InputError("missing input: responses file (no path given)");
  for (const auto& f : files) require(f, "responses file");
  return load_corpus(c.paths.posts, files);
}

std::optional<EmbeddingTable> load_embeddings(const RunConfig& c) {
  if (c.paths.embeddings.empty()) return std::nullopt;
  require(c.paths.embeddings, "embeddings file");
  return EmbeddingTable::load(c.paths.embeddings, parse_embedding_format(c.paths.embeddings_format),
                              c.paths.embeddings_max_words);
}

fs::path measures_path(const RunConfig& c) {
  return c.paths.measures.empty() ? c.paths.out / "measures.jsonl" : c.paths.measures;
}

fs::path sidecar(const fs::path& measures) {
  fs::path p = measures;
  p += ".meta.json";
  return p;
}

void echo_config(const RunConfig& c) { write_text(c.paths.out / "config.ini", normalized_config(c)); }

std::string extension(report::Format f) { return f == report::Format::csv ? ".csv" : ".md"; }

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& c) {
  const Corpus corpus = load_inputs(c, false);
  const auto& r = corpus.report();
  std::cout << "posts: " << r.posts_loaded << " loaded, " << r.posts_rejected << " rejected (empty body)\n"
            << "responses: " << r.responses_loaded << " loaded, " << r.responses_rejected
            << " rejected (attached to rejected posts)\n";
  std::size_t human = 0;
  std::map<std::string, std::size_t> per_model;
  for (std::size_t i = 0; i < corpus.posts().size(); ++i)
    for (const auto& resp : corpus.responses_for(i))
      resp.source.is_human() ? ++human : ++per_model[resp.source.name()];
  std::cout << "  human: " << human << "\n";
  for (const auto& [m, n] : per_model) std::cout << "  " << m << ": " << n << "\n";
  if (!c.paths.lexicon.empty()) {
    require(c.paths.lexicon, "lexicon file");
    const auto lex = Lexicon::load(c.paths.lexicon);
    std::cout << "lexicon: " << lex.categories().size() << " categories, " << lex.literal_count()
              << " words, " << lex.prefix_count() << " prefixes\n";
    MeasureResources res;
    res.lexicon = &lex;
    res.config = c.measure;
    res.baseline = c.baseline;
    validate_resources(res, c.scorer == "builtin");
  }
  if (const auto emb = load_embeddings(c))
    std::cout << "embeddings: " << emb->size() << " words, dim " << emb->dim() << ", "
              << emb->duplicates_skipped() << " duplicates skipped\n";
  return kExitOk;
}

int cmd_generate(const RunConfig& c) {
  const Corpus corpus = load_inputs(c, false);
  std::vector<std::string> models = c.models;
  if (models.empty() && !c.generation.model_name.empty()) models.push_back(c.generation.model_name);
  if (models.empty()) throw InputError("generate needs --model or [generation] model_name");
  echo_config(c);
  bool partial = false;
  for (const auto& model : models) {
    auto gc = c.generation;
    gc.model_name = model;
    gen::Client client(gc, gen::make_http_transport(gc.request_timeout_s));
    const auto responses = c.paths.out / ("responses." + model + ".jsonl");
    const auto summary = gen::run_generation(corpus, client, responses);
    write_text(c.paths.out / ("generation." + model + ".json"), gen::summary_to_json(summary, model));
    std::cout << model << ": " << summary.posts << " posts, " << summary.cache_hits << " cache hits, "
              << summary.cache_misses << " generated, " << summary.failed_post_ids.size()
              << " failed -> " << responses.string() << "\n";
    for (std::size_t i = 0; i < summary.failed_post_ids.size(); ++i)
      std::cerr << "  failed " << summary.failed_post_ids[i] << ": " << summary.failure_messages[i] << "\n";
    partial = partial || summary.partial();
  }
  return partial ? kExitPartial : kExitOk;
}

int cmd_measure(const RunConfig& c) {
  const Corpus corpus = load_inputs(c, true);
  require(c.paths.lexicon, "lexicon file");
  const Lexicon lexicon = Lexicon::load(c.paths.lexicon);
  const auto embeddings = load_embeddings(c);
  if (!embeddings) std::cerr << "warning: no embeddings given; similarity and diversity stay empty\n";

  MeasureResources res;
  res.lexicon = &lexicon;
  res.embeddings = embeddings ? &*embeddings : nullptr;
  res.config = c.measure;
  res.baseline = c.baseline;

  auto handle = ScorerHandle::from_spec(c.scorer, lexicon, c.baseline, c.measure.text, c.plugin);
  const bool builtin = handle.kind() == ScorerHandle::Kind::builtin;
  validate_resources(res, builtin);
  res.scorer_label = handle.label();

  std::vector<ScoreSet> external;
  std::size_t failed = 0;
  if (!builtin) {
    std::vector<std::string> texts;
    for (const auto* r : ordered_responses(corpus)) texts.push_back(r->body);
    auto run = score_texts(handle, texts);
    external = std::move(run.scores);
    failed = run.failed_texts;
  }
  const auto rows = measure_corpus(corpus, res, external, c.workers);

  const auto path = measures_path(c);
  write_measures(path, rows);
  write_text(sidecar(path), json{{"scorer", res.scorer_label},
                                 {"responses", rows.size()},
                                 {"scorer_failed_texts", failed}}
                                    .dump(2) +
                                "\n");
  echo_config(c);

  std::map<std::string, std::size_t> flags;
  for (const auto& row : rows)
    for (const auto& f : row.flags) ++flags[f];
  std::cout << "measured " << rows.size() << " responses with " << res.scorer_label << " -> "
            << path.string() << "\n";
  for (const auto& [f, n] : flags) std::cout << "  flag " << f << ": " << n << "\n";
  if (failed) {
    std::cerr << "scorer failed on " << failed << " texts; their scores are absent\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct LoadedMeasures {
  Corpus corpus;
  std::vector<MeasureRow> rows;
  std::string scorer = "builtin:lexical";
};

LoadedMeasures load_measures(const RunConfig& c) {
  if (c.paths.measures.empty())
    throw InputError("missing input: measures file (pass --measures or set [paths] measures)");
  require(c.paths.measures, "measures file");
  LoadedMeasures m{load_inputs(c, true), read_measures(c.paths.measures), {}};
  m.scorer = "builtin:lexical";
  const auto meta = sidecar(c.paths.measures);
  if (fs::exists(meta)) {
    try {
      std::ifstream in(meta);
      m.scorer = json::parse(in).at("scorer").get<std::string>();
    } catch (const std::exception& e) {
      throw InputError("unreadable " + meta.string() + ": " + e.what());
    }
  }
  return m;
}

std::vector<std::string> known_models(const Corpus& corpus, const RunConfig& c) {
  if (!c.models.empty()) {
    const auto present = corpus.model_names();
    for (const auto& m : c.models)
      if (std::find(present.begin(), present.end(), m) == present.end())
        throw InputError("model '" + m + "' has no responses in the corpus");
    return c.models;
  }
  auto present = corpus.model_names();
  if (present.empty()) throw InputError("the corpus holds no model responses");
  return present;
}

void check_family(const std::vector<std::string>& family, const std::vector<MeasureRow>& rows) {
  const auto known = metric::lexico_semantic();
  for (const auto& m : family) {
    if (std::find(known.begin(), known.end(), m) != known.end()) continue;
    if (metric::is_lexicon_metric(m)) continue;
    throw InputError("unknown metric '" + m + "'");
  }
  (void)rows;
}

std::vector<std::string> lexicon_family(const RunConfig& c, const std::vector<MeasureRow>& rows) {
  if (!c.lexicon_categories.empty()) {
    std::vector<std::string> out;
    for (const auto& cat : c.lexicon_categories) out.push_back(metric::lexicon_metric(cat));
    return out;
  }
  std::set<std::string> names;
  for (const auto& row : rows)
    for (const auto& [k, v] : row.values)
      if (metric::is_lexicon_metric(k)) names.insert(k);
  return {names.begin(), names.end()};
}

void emit(const fs::path& path, const report::Metadata& meta, const std::string& table,
          report::Format format) {
  if (format == report::Format::markdown) {
    write_text(path, report::render_metadata(meta, format) + "\n" + table);
  } else {
    write_text(path, table);
    fs::path meta_path = path;
    meta_path.replace_extension(".meta.csv");
    write_text(meta_path, report::render_metadata(meta, format));
  }
}

int cmd_compare(const RunConfig& c, const std::string& which) {
  if (which != "all" && which != "lexicon" && which != "lexico-semantic")
    throw InputError("--table must be all, lexicon or lexico-semantic");
  const auto m = load_measures(c);
  auto options = c.report;
  options.scorer_label = m.scorer;
  check_family(c.lexico_semantic_metrics, m.rows);
  const auto models = known_models(m.corpus, c);
  echo_config(c);
  for (const auto& model : models) {
    if (which != "lexico-semantic") {
      const auto family = lexicon_family(c, m.rows);
      if (family.empty()) throw InputError("no lexicon categories in the measures file");
      const auto table = report::build_comparison_table(m.rows, m.corpus, model, family, options,
                                                        "Psycholinguistic categories: " + model + " vs human");
      const auto path = c.paths.out / ("table_lexicon." + model + extension(c.format));
      emit(path, table.meta, report::render(table, c.format, options.precision), c.format);
      std::cout << "wrote " << path.string() << "\n";
    }
    if (which != "lexicon") {
      const auto table = report::build_comparison_table(m.rows, m.corpus, model, c.lexico_semantic_metrics,
                                                        options, "Lexico-semantic measures: " + model + " vs human");
      const auto rendered = report::render(table, c.format, options.precision);
      const auto path = c.paths.out / ("table_lexico_semantic." + model + extension(c.format));
      emit(path, table.meta, rendered, c.format);
      std::cout << "wrote " << path.string() << "\n" << rendered;
    }
  }
  return kExitOk;
}

int cmd_multimodel(const RunConfig& c) {
  const auto m = load_measures(c);
  auto options = c.report;
  options.scorer_label = m.scorer;
  check_family(c.lexico_semantic_metrics, m.rows);
  const auto models = known_models(m.corpus, c);
  echo_config(c);
  const auto table = report::build_multimodel_table(m.rows, m.corpus, models, c.lexico_semantic_metrics, options);
  const auto rendered = report::render(table, c.format, options.precision);
  const auto path = c.paths.out / ("table_multimodel" + extension(c.format));
  emit(path, table.meta, rendered, c.format);
  std::cout << "wrote " << path.string() << "\n" << rendered;
  return kExitOk;
}

int cmd_distributions(const RunConfig& c) {
  if (c.paths.measures.empty())
    throw InputError("missing input: measures file (pass --measures or set [paths] measures)");
  require(c.paths.measures, "measures file");
  const auto rows = read_measures(c.paths.measures);
  check_family(c.lexico_semantic_metrics, rows);
  echo_config(c);
  const auto path = c.paths.out / "distributions.csv";
  write_text(path, report::distribution_csv(rows, c.lexico_semantic_metrics, c.histogram_bins));
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Compare human and model-generated peer-support replies"};
  app.fallthrough();
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "INI configuration file");
  app.add_option("--posts", f.posts, "posts JSONL");
  app.add_option("--responses", f.responses, "responses JSONL (comma separated for several)");
  app.add_option("--lexicon", f.lexicon, "category dictionary (.dic)");
  app.add_option("--embeddings", f.embeddings, "word vectors");
  app.add_option("--embeddings-format", f.embeddings_format, "text or binary");
  app.add_option("--model", f.models, "model name (repeatable)")->allow_extra_args(false);
  app.add_option("--scorer", f.scorer, "builtin or plugin:<command>");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--workers", f.workers, "worker threads");
  app.add_option("--format", f.format, "markdown or csv");
  app.add_option("--measures", f.measures, "measures JSONL");

  auto* validate = app.add_subcommand("validate", "load and check inputs, print counts");
  auto* generate = app.add_subcommand("generate", "query a chat-completions endpoint per post");
  generate->add_option("--endpoint", f.endpoint, "base URL, e.g. http://127.0.0.1:8000/v1");
  auto* measure = app.add_subcommand("measure", "compute per-response measures");
  auto* compare = app.add_subcommand("compare", "two-group comparison tables");
  compare->add_option("--table", f.table, "all, lexicon or lexico-semantic");
  auto* multimodel = app.add_subcommand("multimodel", "human vs several models");
  auto* dump = app.add_subcommand("dump-distributions", "per-metric histogram CSV");
  dump->add_option("--bins", f.bins, "histogram bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitInvalid;
  }

  try {
    const RunConfig c = resolve(f);
    if (validate->parsed()) return cmd_validate(c);
    if (generate->parsed()) return cmd_generate(c);
    if (measure->parsed()) return cmd_measure(c);
    if (compare->parsed()) return cmd_compare(c, f.table);
    if (multimodel->parsed()) return cmd_multimodel(c);
    if (dump->parsed()) return cmd_distributions(c);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitInvalid;
}

}  // namespace peerlex::cli
