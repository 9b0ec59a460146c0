#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "palimpsest/config.hpp"
#include "palimpsest/corpus.hpp"
#include "palimpsest/gapped_index.hpp"
#include "palimpsest/reuse_detect.hpp"
#include "palimpsest/text_pipeline.hpp"

namespace palimpsest {

// Default location of a persisted index inside a corpus directory.
std::filesystem::path index_path(const CorpusStore& store, std::string_view corpus_id, const DetectionParams& params);

// Shared corpus/index plumbing behind both the CLI and the HTTP service.
// Analyses and indexes are cached per corpus digest; index builds for one
// corpus are serialized.
class Engine {
 public:
  Engine(Config config, PipelineConfig pipeline);

  const Config& config() const noexcept { return config_; }
  const PipelineConfig& pipeline() const noexcept { return pipeline_; }
  const CorpusStore& store() const noexcept { return store_; }

  Corpus corpus(std::string_view corpus_id) const;
  std::shared_ptr<const AnalyzedCorpus> analyzed(std::string_view corpus_id);
  // A stored index is used when its parameters and digests match; otherwise
  // one is built in memory.
  std::shared_ptr<const Index> index(std::string_view corpus_id, const DetectionParams& params);

  // `b` may be "ALL". Document references go through Corpus::resolve.
  std::vector<PairReport> detect(std::string_view corpus_id, std::string_view a, std::string_view b,
                                 const DetectionParams& params);

  // Identity of a detection result: corpus digest, pipeline, parameters, pair.
  std::string report_key(std::string_view corpus_id, std::string_view doc_a, std::string_view doc_b,
                         const DetectionParams& params);

 private:
  std::mutex& corpus_lock(std::string_view corpus_id);

  Config config_;
  PipelineConfig pipeline_;
  CorpusStore store_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> corpus_locks_;
  std::map<std::string, std::shared_ptr<const AnalyzedCorpus>, std::less<>> analyses_;  // key: corpus digest
  std::map<std::string, std::shared_ptr<const Index>, std::less<>> indexes_;
};

enum class JobStatus { Pending, Running, Done, Failed };
std::string_view job_status_name(JobStatus s);

// HTTP API over an Engine with a bounded detection worker pool.
class Service {
 public:
  Service(Config config, PipelineConfig pipeline);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds the listening socket; port 0 picks a free port. Throws Error when
  // the address is unavailable. Returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void run();
  void stop();

  // Number of detections actually computed (cache misses).
  std::size_t computed_reports() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace palimpsest
