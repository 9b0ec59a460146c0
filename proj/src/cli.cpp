#include "palimpsest/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "palimpsest/config.hpp"
#include "palimpsest/corpus.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/eval_harness.hpp"
#include "palimpsest/report.hpp"
#include "palimpsest/service.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace fs = std::filesystem;

namespace {

constexpr const char* kUsage =
    "usage: palimpsest <command> [options]\n"
    "\n"
    "commands:\n"
    "  ingest   --corpus <id> <files...>          add documents to a corpus\n"
    "  index    --corpus <id> [--nw 3 --nh 2]     build and store the fingerprint index\n"
    "  detect   --corpus <id> --a <doc> --b <doc|ALL> [--out report.json]\n"
    "  context  --corpus <id> --a <doc> --b <doc> --block <n> [--radius 200]\n"
    "  sweep    --corpus <id> --gold <path> [--nw 1..6 --nh 0..5]\n"
    "  serve    [--bind 127.0.0.1 --port 8420]\n"
    "\n"
    "global options: --root <dir>, --config <file>; run 'palimpsest <command> --help' for details\n";

struct Flags {
  std::string config_path;
  std::string root;
  std::optional<std::size_t> n_w, n_h, s_min;
  std::string splice_gap;
  std::string lang, stoplist, overrides;
  std::optional<double> weak_df;
  std::optional<std::size_t> weak_rank;
};

void add_pipeline_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--lang", f.lang, "Language: fr or en");
  cmd->add_option("--stoplist", f.stoplist, "Stoplist file, one form per line");
  cmd->add_option("--strength-overrides", f.overrides, "stem<TAB>STRONG|WEAK file");
  cmd->add_option("--weak-df", f.weak_df, "Document-frequency ratio above which a stem is weak");
  cmd->add_option("--weak-rank", f.weak_rank, "Number of most frequent stems treated as weak");
}

void add_window_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--nw", f.n_w, "Window size in content words");
  cmd->add_option("--nh", f.n_h, "Maximum holes");
}

void add_detect_flags(CLI::App* cmd, Flags& f) {
  add_window_flags(cmd, f);
  cmd->add_option("--smin", f.s_min, "Minimum distinct strong stems per block");
  cmd->add_option("--splice-gap", f.splice_gap, "Maximum anchor gap for splicing, or 'auto'");
}

std::size_t parse_count(const std::string& flag, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw UsageError(flag + ": expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

// "3", "1..6" or "1,2,4".
std::vector<std::size_t> parse_range(const std::string& flag, const std::string& text) {
  std::vector<std::size_t> out;
  if (std::size_t dots = text.find(".."); dots != std::string::npos) {
    const std::size_t lo = parse_count(flag, std::string_view(text).substr(0, dots));
    const std::size_t hi = parse_count(flag, std::string_view(text).substr(dots + 2));
    if (hi < lo) throw UsageError(flag + ": empty range " + text);
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_count(flag, std::string_view(text).substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

Config resolve_config(const Flags& f) {
  Config c;
  if (!f.config_path.empty()) {
    c = load_config(f.config_path);
  } else if (fs::exists("palimpsest.toml")) {
    c = load_config("palimpsest.toml");
  }
  apply_environment(c);
  if (!f.root.empty()) c.root = f.root;
  if (f.n_w) c.params.n_w = *f.n_w;
  if (f.n_h) c.params.n_h = *f.n_h;
  if (f.s_min) c.params.s_min = *f.s_min;
  if (!f.splice_gap.empty()) {
    if (f.splice_gap == "auto") {
      c.params.splice_gap.reset();
    } else {
      c.params.splice_gap = parse_count("--splice-gap", f.splice_gap);
    }
  }
  if (!f.lang.empty()) c.language = parse_language(f.lang);
  if (!f.stoplist.empty()) c.stoplist = fs::path(f.stoplist);
  if (!f.overrides.empty()) c.strength_overrides = fs::path(f.overrides);
  if (f.weak_df) c.strength.weak_df = *f.weak_df;
  if (f.weak_rank) c.strength.weak_rank = *f.weak_rank;
  c.params.validate();
  return c;
}

std::string pair_file_name(const PairReport& r) { return r.doc_a + "--" + r.doc_b + ".json"; }

void summarize(std::ostream& out, const PairReport& r) {
  out << r.doc_a << " vs " << r.doc_b << ": " << r.match_count << " matches, " << r.blocks.size() << " blocks, "
      << r.zones.size() << " zones\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return 1;
  }

  CLI::App app{"Approximate text reuse detection", "palimpsest"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_path, "Key/value configuration file");
  app.add_option("--root", f.root, "Corpus root directory (overrides PALIMPSEST_ROOT)");

  std::string corpus_id;

  auto* ingest = app.add_subcommand("ingest", "Add documents to a corpus");
  std::vector<std::string> files;
  std::string title, author, encoding = "utf-8";
  ingest->add_option("--corpus", corpus_id, "Corpus id")->required();
  ingest->add_option("--title", title, "Title (single file only; default: file name stem)");
  ingest->add_option("--author", author, "Author");
  ingest->add_option("--encoding", encoding, "Input encoding (default utf-8)");
  ingest->add_option("files", files, "Text files")->required();

  auto* index = app.add_subcommand("index", "Build and store the fingerprint index");
  bool prune = false;
  std::string index_out;
  index->add_option("--corpus", corpus_id, "Corpus id")->required();
  index->add_flag("--prune-singletons", prune, "Drop fingerprints found in a single document");
  index->add_option("--out", index_out, "Index file (default: inside the corpus directory)");
  add_window_flags(index, f);
  add_pipeline_flags(index, f);

  auto* detect = app.add_subcommand("detect", "Detect reuse between two documents");
  std::string doc_a, doc_b, out_path;
  detect->add_option("--corpus", corpus_id, "Corpus id")->required();
  detect->add_option("--a", doc_a, "First document (id, id prefix or title)")->required();
  detect->add_option("--b", doc_b, "Second document, or ALL")->required();
  detect->add_option("--out", out_path, "Report file (a directory with --b ALL); default stdout");
  add_detect_flags(detect, f);
  add_pipeline_flags(detect, f);

  auto* context = app.add_subcommand("context", "Show a block in its surroundings");
  std::size_t block_id = 0;
  std::size_t radius = 200;
  context->add_option("--corpus", corpus_id, "Corpus id")->required();
  context->add_option("--a", doc_a, "First document")->required();
  context->add_option("--b", doc_b, "Second document")->required();
  context->add_option("--block", block_id, "Block id from the report")->required();
  context->add_option("--radius", radius, "Context radius in characters");
  add_detect_flags(context, f);
  add_pipeline_flags(context, f);

  auto* sweep = app.add_subcommand("sweep", "Score a parameter grid against gold spans");
  std::string gold_path, nw_range = "1..6", nh_range = "0..5", csv_path, table_path;
  std::optional<double> theta, beta;
  sweep->add_option("--corpus", corpus_id, "Corpus id")->required();
  sweep->add_option("--gold", gold_path, "Gold spans (JSON lines)")->required();
  sweep->add_option("--nw", nw_range, "Window sizes, e.g. 1..6");
  sweep->add_option("--nh", nh_range, "Hole counts, e.g. 0..5");
  sweep->add_option("--smin", f.s_min, "Minimum distinct strong stems per block");
  sweep->add_option("--splice-gap", f.splice_gap, "Maximum anchor gap for splicing, or 'auto'");
  sweep->add_option("--overlap-theta", theta, "Minimum overlap ratio on each axis");
  sweep->add_option("--beta", beta, "F-score beta");
  sweep->add_option("--csv", csv_path, "Write the CSV here");
  sweep->add_option("--table", table_path, "Write the text tables here");
  add_pipeline_flags(sweep, f);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string bind_host;
  std::optional<int> port;
  std::optional<unsigned> workers;
  serve->add_option("--bind", bind_host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--workers", workers, "Detection worker threads");
  add_pipeline_flags(serve, f);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << kUsage;
    return 1;
  }

  try {
    Config config = resolve_config(f);

    if (*ingest) {
      if (!title.empty() && files.size() != 1) throw UsageError("--title needs exactly one file");
      std::vector<IngestRequest> requests;
      for (const std::string& file : files) {
        IngestRequest r;
        r.path = file;
        r.meta.title = title;
        r.meta.author = author;
        r.meta.encoding = encoding;
        requests.push_back(std::move(r));
      }
      CorpusStore store(config.root);
      IngestReport rep = store.ingest(corpus_id, requests);
      for (const std::string& w : rep.warnings) err << "warning: " << w << "\n";
      Corpus c = store.load(corpus_id);
      for (const std::string& id : rep.doc_ids) out << id << "\t" << c.find(id)->title << "\n";
      out << rep.added << " added, " << c.size() << " documents in " << corpus_id << "\n";
      return 0;
    }

    Engine engine(config, pipeline_config(config));

    if (*index) {
      auto analysis = engine.analyzed(corpus_id);
      IndexOptions io;
      io.prune_singletons = prune;
      Index built = Index::build(*analysis, config.params, io);
      const fs::path target = index_out.empty() ? index_path(engine.store(), corpus_id, config.params) : fs::path(index_out);
      built.save(target);
      out << "indexed " << built.doc_ids().size() << " documents, " << built.size() << " postings (n_w="
          << config.params.n_w << ", n_h=" << config.params.n_h << ") -> " << target.string() << "\n";
      return 0;
    }

    if (*detect) {
      std::vector<PairReport> reports = engine.detect(corpus_id, doc_a, doc_b, config.params);
      if (doc_b == "ALL") {
        if (out_path.empty()) {
          out << render_reports(reports);
        } else {
          fs::create_directories(out_path);
          for (const PairReport& r : reports) {
            fsutil::write_file_atomic(fs::path(out_path) / pair_file_name(r), render_report(r));
            summarize(out, r);
          }
        }
      } else if (out_path.empty()) {
        out << render_report(reports.front());
      } else {
        fsutil::write_file_atomic(out_path, render_report(reports.front()));
        summarize(out, reports.front());
      }
      return 0;
    }

    if (*context) {
      if (doc_b == "ALL") throw UsageError("context needs two documents");
      std::vector<PairReport> reports = engine.detect(corpus_id, doc_a, doc_b, config.params);
      const PairReport& r = reports.front();
      if (block_id >= r.blocks.size()) {
        throw UsageError("block " + std::to_string(block_id) + " does not exist (report has " +
                         std::to_string(r.blocks.size()) + " blocks)");
      }
      auto analysis = engine.analyzed(corpus_id);
      out << render_context(extract_context(r.blocks[block_id], *analysis->find(r.doc_a), *analysis->find(r.doc_b), radius));
      return 0;
    }

    if (*sweep) {
      std::vector<std::size_t> nws = parse_range("--nw", nw_range);
      std::vector<std::size_t> nhs = parse_range("--nh", nh_range);
      for (std::size_t nw : nws) {
        for (std::size_t nh : nhs) DetectionParams{nw, nh, config.params.s_min, config.params.splice_gap}.validate();
      }
      Corpus c = engine.corpus(corpus_id);
      std::vector<GoldSpan> gold = resolve_gold(load_gold(gold_path), c);
      auto analysis = engine.analyzed(corpus_id);
      EvalOptions eo;
      eo.s_min = config.params.s_min;
      eo.splice_gap = config.params.splice_gap;
      eo.overlap.theta = theta.value_or(config.overlap_theta);
      eo.beta = beta.value_or(config.beta);
      SweepResult result = parameter_sweep(*analysis, gold, nws, nhs, eo);
      const std::string csv = sweep_csv(result);
      const std::string table = sweep_table(result);
      if (!csv_path.empty()) fsutil::write_file_atomic(csv_path, csv);
      if (!table_path.empty()) fsutil::write_file_atomic(table_path, table);
      out << table;
      if (csv_path.empty()) out << "\n" << csv;
      return 0;
    }

    if (*serve) {
      if (!bind_host.empty()) config.bind_host = bind_host;
      if (port) config.port = static_cast<std::uint16_t>(*port);
      if (workers) config.workers = std::max(1u, *workers);
      Service service(config, pipeline_config(config));
      const int bound = service.bind(config.bind_host, config.port);
      out << "listening on http://" << config.bind_host << ":" << bound << "\n" << std::flush;
      service.run();
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << kUsage;
  return 1;
}

}  // namespace palimpsest
