#include "palimpsest/corpus.hpp"

#include <algorithm>
#include <future>

#include <json.hpp>

#include "palimpsest/digest.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/unicode.hpp"
#include "fsutil.hpp"

namespace palimpsest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestSchema = 1;

using fsutil::read_file;
using fsutil::write_file_atomic;

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string normalize_text(std::string_view raw, std::string_view encoding) {
  std::u32string text = unicode::decode_utf8(unicode::to_utf8(raw, encoding));

  std::u32string unified;
  unified.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char32_t c = text[i];
    if (c == U'\r') {
      unified.push_back(U'\n');
      if (i + 1 < text.size() && text[i + 1] == U'\n') ++i;
    } else {
      unified.push_back(c);
    }
  }

  std::u32string composed = unicode::nfc(unified);
  std::u32string out;
  out.reserve(composed.size());
  for (std::size_t i = 0; i < composed.size(); ++i) {
    char32_t c = composed[i];
    if (c == U'\uFEFF' && out.empty()) continue;
    if (c != U'\n' && c != U'\t' && unicode::is_control(c)) continue;
    out.push_back(c);
  }
  return unicode::encode_utf8(out);
}

std::string make_doc_id(std::string_view text_digest, std::string_view title) {
  std::string key;
  key.reserve(text_digest.size() + title.size() + 1);
  key.append(text_digest).push_back('\x1f');
  key.append(title);
  return sha256_hex(key).substr(0, 16);
}

Document make_document(std::string_view raw, const DocumentMeta& meta) {
  Document doc;
  doc.text = normalize_text(raw, meta.encoding);
  if (doc.text.empty()) throw DataError("empty document");
  doc.title = meta.title;
  doc.author = meta.author;
  doc.source_path = meta.source_path;
  doc.digest = sha256_hex(doc.text);
  doc.char_count = unicode::code_point_count(doc.text);
  doc.doc_id = make_doc_id(doc.digest, doc.title);
  return doc;
}

std::string manifest_digest(std::span<const std::pair<std::string, std::string>> members) {
  std::vector<std::pair<std::string, std::string>> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  std::string key;
  for (const auto& [id, digest] : sorted) {
    key.append(id).push_back(':');
    key.append(digest).push_back('\n');
  }
  return sha256_hex(key);
}

Corpus::Corpus(std::string corpus_id) : id_(std::move(corpus_id)) { refresh_digest(); }

std::pair<std::string, bool> Corpus::add(Document doc) {
  auto it = std::lower_bound(docs_.begin(), docs_.end(), doc.doc_id,
                             [](const Document& d, const std::string& id) { return d.doc_id < id; });
  if (it != docs_.end() && it->doc_id == doc.doc_id) return {it->doc_id, false};
  std::string id = doc.doc_id;
  docs_.insert(it, std::move(doc));
  refresh_digest();
  return {id, true};
}

const Document* Corpus::find(std::string_view doc_id) const {
  auto idx = index_of(doc_id);
  return idx ? &docs_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(std::string_view doc_id) const {
  auto it = std::lower_bound(docs_.begin(), docs_.end(), doc_id,
                             [](const Document& d, std::string_view id) { return d.doc_id < id; });
  if (it == docs_.end() || it->doc_id != doc_id) return std::nullopt;
  return static_cast<std::size_t>(it - docs_.begin());
}

const Document& Corpus::resolve(std::string_view ref) const {
  if (const Document* d = find(ref)) return *d;
  const Document* hit = nullptr;
  std::size_t hits = 0;
  std::string lref = lower_ascii(ref);
  for (const Document& d : docs_) {
    if (lower_ascii(d.title) == lref) {
      hit = &d;
      ++hits;
    }
  }
  if (hits == 0 && !ref.empty()) {
    for (const Document& d : docs_) {
      if (d.doc_id.starts_with(ref)) {
        hit = &d;
        ++hits;
      }
    }
  }
  if (hits == 1) return *hit;
  if (hits > 1) throw DataError("ambiguous document reference: " + std::string(ref));
  throw DataError("unknown document: " + std::string(ref));
}

void Corpus::refresh_digest() {
  std::vector<std::pair<std::string, std::string>> members;
  members.reserve(docs_.size());
  for (const Document& d : docs_) members.emplace_back(d.doc_id, d.digest);
  digest_ = palimpsest::manifest_digest(members);
}

void validate_corpus_id(std::string_view corpus_id) {
  if (corpus_id.empty() || corpus_id == "." || corpus_id == ".." ||
      !std::all_of(corpus_id.begin(), corpus_id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
      })) {
    throw UsageError("invalid corpus id: '" + std::string(corpus_id) + "'");
  }
}

CorpusStore::CorpusStore(fs::path root) : root_(std::move(root)) {}

fs::path CorpusStore::corpus_dir(std::string_view corpus_id) const {
  validate_corpus_id(corpus_id);
  return root_ / std::string(corpus_id);
}

std::vector<std::string> CorpusStore::list() const {
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return ids;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool CorpusStore::exists(std::string_view corpus_id) const {
  return fs::exists(corpus_dir(corpus_id) / "manifest.json");
}

Corpus CorpusStore::load(std::string_view corpus_id) const {
  fs::path dir = corpus_dir(corpus_id);
  fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw DataError("no such corpus: " + std::string(corpus_id));
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  Corpus corpus{std::string(corpus_id)};
  try {
    for (const json& entry : manifest.at("documents")) {
      Document doc;
      doc.doc_id = entry.at("doc_id").get<std::string>();
      doc.title = entry.at("title").get<std::string>();
      doc.author = entry.value("author", "");
      doc.digest = entry.at("digest").get<std::string>();
      doc.char_count = entry.at("char_count").get<std::size_t>();
      doc.source_path = entry.value("source_path", "");
      doc.text = read_file(dir / "docs" / (doc.doc_id + ".txt"));
      if (sha256_hex(doc.text) != doc.digest) {
        throw DataError("document " + doc.doc_id + " does not match its manifest digest");
      }
      corpus.add(std::move(doc));
    }
  } catch (const json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  return corpus;
}

void CorpusStore::save(const Corpus& corpus) const {
  fs::path dir = corpus_dir(corpus.id());
  fs::create_directories(dir / "docs");
  json docs = json::array();
  for (const Document& d : corpus.documents()) {
    fs::path text_path = dir / "docs" / (d.doc_id + ".txt");
    if (!fs::exists(text_path)) write_file_atomic(text_path, d.text);
    docs.push_back({{"doc_id", d.doc_id},
                    {"title", d.title},
                    {"author", d.author},
                    {"digest", d.digest},
                    {"char_count", d.char_count},
                    {"source_path", d.source_path}});
  }
  json manifest = {{"schema_version", kManifestSchema},
                   {"corpus_id", corpus.id()},
                   {"manifest_digest", corpus.manifest_digest()},
                   {"documents", docs}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

IngestReport CorpusStore::ingest(std::string_view corpus_id,
                                 const std::vector<IngestRequest>& requests) {
  validate_corpus_id(corpus_id);

  std::vector<std::future<Document>> pending;
  pending.reserve(requests.size());
  for (const IngestRequest& req : requests) {
    pending.push_back(std::async(std::launch::async, [&req] {
      DocumentMeta meta = req.meta;
      if (meta.title.empty()) meta.title = req.path.stem().string();
      if (meta.source_path.empty()) meta.source_path = req.path.string();
      std::string raw = req.bytes ? *req.bytes : read_file(req.path);
      try {
        return make_document(raw, meta);
      } catch (const DataError& e) {
        std::string where = meta.source_path.empty() ? meta.title : meta.source_path;
        if (const auto* de = dynamic_cast<const DecodeError*>(&e)) {
          throw DecodeError(where + ": " + de->what(), de->byte_offset());
        }
        throw DataError(where + ": " + e.what());
      }
    }));
  }
  std::vector<Document> docs;
  docs.reserve(pending.size());
  for (auto& f : pending) docs.push_back(f.get());

  std::lock_guard lock(writer_);
  Corpus corpus = exists(corpus_id) ? load(corpus_id) : Corpus{std::string(corpus_id)};
  IngestReport report;
  for (Document& doc : docs) {
    for (const Document& other : corpus.documents()) {
      if (other.title == doc.title && other.digest != doc.digest) {
        report.warnings.push_back("duplicate title '" + doc.title +
                                  "' with different content; kept as " + doc.doc_id);
        break;
      }
    }
    auto [id, inserted] = corpus.add(std::move(doc));
    report.doc_ids.push_back(id);
    report.added += inserted ? 1 : 0;
  }
  save(corpus);
  return report;
}

}  // namespace palimpsest
