#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "palimpsest/cli.hpp"
#include "palimpsest/config.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/report.hpp"
#include "support.hpp"

using namespace palimpsest;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Temp store with the fixture texts ingested into corpus "demo".
struct Store {
  testsupport::TempDir tmp;
  std::string root = (tmp.path() / "root").string();
  std::string config = (tmp.path() / "palimpsest.toml").string();
  Store() {
    std::string cfg = testsupport::read_text(testsupport::fixtures_dir() / "palimpsest.toml");
    std::FILE* f = std::fopen(config.c_str(), "wb");
    std::fwrite(cfg.data(), 1, cfg.size(), f);
    std::fclose(f);
    std::vector<std::string> args{"--config", config, "--root", root, "ingest", "--corpus", "demo"};
    for (const auto& p : testsupport::fixture_files()) args.push_back(p.string());
    Run r = cli(args);
    REQUIRE(r.code == 0);
  }
  std::vector<std::string> base() const { return {"--config", config, "--root", root}; }
};

std::vector<std::string> operator+(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("usage and exit codes") {
  Run none = cli({});
  CHECK(none.code == 1);
  CHECK(none.err.find("usage") != std::string::npos);
  CHECK(cli({"--bogus"}).code == 1);
  CHECK(cli({"--help"}).code == 0);

  Store s;
  Run zero = cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "cid", "--b", "plaideurs", "--nw", "0"});
  CHECK(zero.code == 1);
  CHECK(zero.err.find("window size must be ≥ 1") != std::string::npos);
  CHECK(cli(s.base() + std::vector<std::string>{"detect", "--corpus", "nope", "--a", "x", "--b", "y"}).code == 2);
  CHECK(cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "missing", "--b", "cid"}).code == 2);
  Run self = cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "cid", "--b", "cid"});
  CHECK(self.code == 1);
  CHECK(self.err.find("separate document") != std::string::npos);
}

TEST_CASE("ingest is idempotent") {
  Store s;
  std::vector<std::string> args = s.base() + std::vector<std::string>{"ingest", "--corpus", "demo"};
  for (const auto& p : testsupport::fixture_files()) args.push_back(p.string());
  Run again = cli(args);
  CHECK(again.code == 0);
  CHECK(again.out.find("0 added, 10 documents in demo") != std::string::npos);
}

TEST_CASE("detect writes a report") {
  Store s;
  const std::string out = (s.tmp.path() / "cid.json").string();
  Run r = cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "cid", "--b", "plaideurs", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1 blocks") != std::string::npos);
  PairReport rep = parse_report(testsupport::read_text(out));
  CHECK(rep.blocks.size() == 1);
  CHECK(rep.params.n_w == 3);
  CHECK(rep.params.n_h == 2);
  CHECK(render_report(rep) == testsupport::read_text(out));

  Run stdout_run = cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "cid", "--b", "plaideurs"});
  CHECK(stdout_run.out == testsupport::read_text(out));

  const std::string dir = (s.tmp.path() / "all").string();
  Run all = cli(s.base() + std::vector<std::string>{"detect", "--corpus", "demo", "--a", "cid", "--b", "ALL", "--out", dir});
  CHECK(all.code == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 9);
}

TEST_CASE("index, context and sweep commands") {
  Store s;
  Run idx = cli(s.base() + std::vector<std::string>{"index", "--corpus", "demo"});
  CHECK(idx.code == 0);
  CHECK(idx.out.find("indexed 10 documents") != std::string::npos);
  CHECK(fs::exists(fs::path(s.root) / "demo" / "index-nw3-nh2.plmp"));

  Run ctx = cli(s.base() + std::vector<std::string>{"context", "--corpus", "demo", "--a", "cid", "--b", "plaideurs", "--block", "0", "--radius", "0"});
  CHECK(ctx.code == 0);
  CHECK(ctx.out.find("rides sur son front ont gravé ses exploits") != std::string::npos);
  CHECK(cli(s.base() + std::vector<std::string>{"context", "--corpus", "demo", "--a", "cid", "--b", "plaideurs", "--block", "7"}).code != 0);

  const std::string csv = (s.tmp.path() / "s.csv").string();
  Run sw = cli(s.base() + std::vector<std::string>{"sweep", "--corpus", "demo", "--gold",
                                                    (testsupport::fixtures_dir() / "gold.jsonl").string(), "--nw", "1..3",
                                                    "--nh", "0,2", "--csv", csv});
  CHECK(sw.code == 0);
  CHECK(sw.out.find("F-score") != std::string::npos);
  const std::string body = testsupport::read_text(csv);
  CHECK(body.find("3,2,6,0,0,1.00,1.00,1.00") != std::string::npos);
  CHECK(std::count(body.begin(), body.end(), '\n') == 7);
  CHECK(cli(s.base() + std::vector<std::string>{"sweep", "--corpus", "demo", "--gold", "x.jsonl", "--nw", "3..1"}).code == 1);
}

TEST_CASE("config parsing") {
  Config c = parse_config(
      "# comment\nroot = \"store\"\n[detect]\nn_w = 4\nn_h = 1\ns_min = 3\nsplice_gap = 7\n[strength]\n"
      "weak_df = 0.25\nweak_rank = 12\n[eval]\noverlap_theta = 0.2\nbeta = 1\n"
      "[service]\nbind = \"0.0.0.0\"\nport = 9000\nworkers = 3\nlanguage = en\n",
      "/base");
  CHECK(c.root == fs::path("/base/store"));
  CHECK(c.params.n_w == 4);
  CHECK(c.params.n_h == 1);
  CHECK(c.params.s_min == 3);
  CHECK(c.params.splice_gap == 7);
  CHECK(c.strength.weak_df == 0.25);
  CHECK(c.strength.weak_rank == 12);
  CHECK(c.overlap_theta == 0.2);
  CHECK(c.beta == 1.0);
  CHECK(c.bind_host == "0.0.0.0");
  CHECK(c.port == 9000);
  CHECK(c.workers == 3);
  CHECK(c.language == Language::English);
  CHECK_FALSE(parse_config("splice_gap = auto\n").params.splice_gap);
  CHECK_THROWS_AS(parse_config("colour = red\n"), DataError);
  CHECK_THROWS_AS(parse_config("n_w = many\n"), DataError);

  Config d;
  CHECK(d.params == DetectionParams{3, 2, 4});
  CHECK(d.overlap_theta == 0.1);
  CHECK(d.beta == 0.5);
}

TEST_CASE("root from the environment") {
  Config c;
  ::setenv("PALIMPSEST_ROOT", "/srv/corpora", 1);
  apply_environment(c);
  CHECK(c.root == fs::path("/srv/corpora"));
  ::setenv("PALIMPSEST_ROOT", "", 1);
  Config e;
  apply_environment(e);
  CHECK(e.root == fs::path("corpus"));
  ::unsetenv("PALIMPSEST_ROOT");
}
