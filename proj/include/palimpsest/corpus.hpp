#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace palimpsest {

struct DocumentMeta {
  std::string title;
  std::string author;
  std::string source_path;
  std::string encoding = "utf-8";
};

struct Document {
  std::string doc_id;
  std::string title;
  std::string author;
  std::string text;  // normalized UTF-8
  std::string source_path;
  std::string digest;  // SHA-256 of text
  std::size_t char_count = 0;  // scalar code points

  friend bool operator==(const Document&, const Document&) = default;
};

// NFC composition, "\r\n" and lone "\r" become "\n", control characters other
// than "\n" and "\t" (and a leading BOM) are dropped. Case and punctuation are
// kept. Idempotent.
std::string normalize_text(std::string_view raw, std::string_view encoding = "utf-8");

// Content-derived identity: the same text under the same title always maps to
// the same id; identical texts under different titles get distinct ids.
std::string make_doc_id(std::string_view text_digest, std::string_view title);

// Throws DataError("empty document") when the normalized text is empty.
Document make_document(std::string_view raw, const DocumentMeta& meta);

// Digest over the sorted (doc_id, text digest) membership.
std::string manifest_digest(std::span<const std::pair<std::string, std::string>> members);

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string corpus_id);

  const std::string& id() const noexcept { return id_; }
  std::span<const Document> documents() const noexcept { return docs_; }
  std::size_t size() const noexcept { return docs_.size(); }
  const std::string& manifest_digest() const noexcept { return digest_; }

  // Inserts in doc_id order. Returns the doc_id and whether it was new.
  std::pair<std::string, bool> add(Document doc);

  const Document* find(std::string_view doc_id) const;
  std::optional<std::size_t> index_of(std::string_view doc_id) const;

  // Accepts a doc_id, a unique doc_id prefix, or a title (case-insensitive).
  const Document& resolve(std::string_view ref) const;

 private:
  void refresh_digest();

  std::string id_;
  std::vector<Document> docs_;
  std::string digest_;
};

struct IngestRequest {
  std::filesystem::path path;          // read when bytes is empty
  std::optional<std::string> bytes;
  DocumentMeta meta;                   // title defaults to the file stem
};

struct IngestReport {
  std::vector<std::string> doc_ids;    // one per request, in request order
  std::vector<std::string> warnings;
  std::size_t added = 0;
};

// Directory-backed corpus store:
//   <root>/<corpus_id>/docs/<doc_id>.txt
//   <root>/<corpus_id>/manifest.json
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path corpus_dir(std::string_view corpus_id) const;

  std::vector<std::string> list() const;
  bool exists(std::string_view corpus_id) const;
  Corpus load(std::string_view corpus_id) const;
  void save(const Corpus& corpus) const;

  // Documents are decoded and normalized concurrently; the manifest is
  // written once, under the store's writer lock.
  IngestReport ingest(std::string_view corpus_id, const std::vector<IngestRequest>& requests);

 private:
  std::filesystem::path root_;
  mutable std::mutex writer_;
};

void validate_corpus_id(std::string_view corpus_id);

}  // namespace palimpsest
