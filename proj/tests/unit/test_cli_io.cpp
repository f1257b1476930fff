#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "egoe/egoe.hpp"

using namespace egoe;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("egoe_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& args) {
  const std::string cmd = std::string(EGOE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

EnsembleSpec small_spec() {
  EnsembleSpec s;
  s.statistics = Statistics::Fermion;
  s.m = 3;
  s.N = 8;
  s.k = 2;
  s.members = 3;
  s.master_seed = 5;
  return s;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Archive, RoundTripIsBitExact) {
  const auto spec = small_spec();
  auto spectra = generate_spectra(spec, 1);
  spectra[0].levels[0] = -0.0;
  spectra[1].levels[2] = 1e-308;
  const auto a = make_archive(spec, spectra);
  const auto bytes = encode_archive(a);
  EXPECT_EQ(bytes.substr(0, 8), "EGOEARC1");
  const auto b = decode_archive(bytes);
  EXPECT_EQ(b.records, a.records);
  EXPECT_EQ(b.header.spec, spec);
  EXPECT_EQ(encode_archive(b), bytes);
  EXPECT_TRUE(std::signbit(b.records[0].eigenvalues[0]));

  const auto dir = scratch("archive");
  write_archive_file(dir / "a.egoearc", a);
  EXPECT_EQ(slurp(dir / "a.egoearc"), bytes);
  EXPECT_EQ(read_archive_file(dir / "a.egoearc").records, a.records);
}

TEST(Archive, HeaderFields) {
  const auto spec = small_spec();
  const auto a = make_archive(spec, generate_spectra(spec, 1));
  const auto j = header_json(a.header);
  for (const char* key : {"format", "format_version", "statistics", "m", "N", "k", "nu2", "master_seed", "members",
                          "dimension", "created"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["dimension"], 56);
  EXPECT_EQ(a.records[1].seed, member_seed(5, 1));
}

TEST(Archive, CorruptInputIsRejected) {
  const auto spec = small_spec();
  const auto bytes = encode_archive(make_archive(spec, generate_spectra(spec, 1)));
  EXPECT_THROW(decode_archive("NOTANARCHIVE"), IoError);
  EXPECT_THROW(decode_archive(bytes.substr(0, bytes.size() - 3)), IoError);
  EXPECT_THROW(decode_archive(bytes + "x"), IoError);
  std::string bad = bytes;
  bad[12] = '!';
  EXPECT_THROW(decode_archive(bad), IoError);
  EXPECT_THROW(read_archive_file("/nonexistent/dir/x.egoearc"), IoError);
}

TEST(Archive, CountMismatch) {
  auto spec = small_spec();
  auto spectra = generate_spectra(spec, 1);
  spectra.pop_back();
  EXPECT_THROW(make_archive(spec, spectra), DomainError);
}

TEST(Archive, TimestampFromEnvironment) {
  ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
  EXPECT_EQ(archive_timestamp(), "1970-01-02T00:00:00Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(archive_timestamp(), "1970-01-01T00:00:00Z");
}

TEST(Config, DefaultsAndRoundTrip) {
  RunConfig c;
  c.ensemble = small_spec();
  c.orders = {2, 4};
  c.trim = 0.2;
  const auto j = to_json(c);
  EXPECT_EQ(j["format_version"], "egoe-run/1");
  const auto back = run_config_from_json(j);
  EXPECT_EQ(back.ensemble, c.ensemble);
  EXPECT_EQ(back.orders, c.orders);
  EXPECT_EQ(back.trim, 0.2);
}

TEST(Config, Validation) {
  const auto bad = [](nlohmann::json j) { EXPECT_THROW(run_config_from_json(j), DomainError) << j.dump(); };
  bad({{"orders", {1, 2}}});
  bad({{"orders", {7}}});
  bad({{"orders", nlohmann::json::array()}});
  bad({{"trim", 0.6}});
  bad({{"l_max", 1.0}});
  bad({{"oversample", 0.5}});
  bad({{"histogram_bin", 0.0}});
  bad({{"unknown_key", 1}});
  bad({{"format_version", "egoe-run/9"}});
  bad({{"ensemble", {{"k", 9}, {"m", 6}}}});
  bad({{"ensemble", {{"statistics", "anyon"}}}});
  bad({{"trim", "a lot"}});
  EXPECT_NO_THROW(run_config_from_json(nlohmann::json::object()));
}

TEST(Csv, HeaderQuotingAndPrecision) {
  const auto dir = scratch("csv");
  {
    CsvWriter w(dir / "t.csv", {"name", "value", "count"});
    w.row({std::string("a,b"), 0.1, 3LL});
    w.row({std::string("say \"hi\""), 1e-300, -1LL});
    EXPECT_THROW(w.row({1.0}), DomainError);
  }
  EXPECT_EQ(slurp(dir / "t.csv"),
            "name,value,count\n\"a,b\",0.10000000000000001,3\n\"say \"\"hi\"\"\",1e-300,-1\n");
  EXPECT_THROW(CsvWriter(dir / "missing" / "x.csv", {"a"}), IoError);
}

TEST(Cli, GenerateIsDeterministicAcrossRunsAndThreads) {
  const auto dir = scratch("cli_generate");
  const std::string common = "generate --statistics fermion -m 4 -N 9 -k 2 --members 4 --seed 9 ";
  ASSERT_EQ(run(common + "--threads 1 --out " + (dir / "a.egoearc").string()), 0);
  ASSERT_EQ(run(common + "--threads 1 --out " + (dir / "b.egoearc").string()), 0);
  ASSERT_EQ(run(common + "--threads 3 --out " + (dir / "c.egoearc").string() + " --export-json " +
                (dir / "c.json").string()),
            0);
  const auto a = slurp(dir / "a.egoearc");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b.egoearc"));
  EXPECT_EQ(a, slurp(dir / "c.egoearc"));
  const auto j = nlohmann::json::parse(slurp(dir / "c.json"));
  EXPECT_EQ(j["format_version"], "egoe-run/1");
  EXPECT_EQ(j["config"]["ensemble"]["m"], 4);
  EXPECT_EQ(j["archive"]["records"].size(), 4u);
}

TEST(Cli, KEqualsMArchiveMatchesDirectGoe) {
  const auto dir = scratch("cli_goe");
  ASSERT_EQ(run("generate --statistics boson -m 3 -N 4 -k 3 --members 1 --seed 77 --out " +
                (dir / "g.egoearc").string()),
            0);
  const auto archive = read_archive_file(dir / "g.egoearc");
  EnsembleSpec spec;
  spec.statistics = Statistics::Boson;
  spec.m = spec.k = 3;
  spec.N = 4;
  spec.members = 1;
  spec.master_seed = 77;
  EXPECT_EQ(archive.records[0].eigenvalues, symmetric_eigenvalues(sample_kbody(spec, 0).values));
}

TEST(Cli, DecomposeFluctAnalyticOutputs) {
  const auto dir = scratch("cli_pipeline");
  const auto arc = (dir / "s.egoearc").string();
  ASSERT_EQ(run("generate --statistics fermion -m 5 -N 10 -k 2 --members 3 --out " + arc), 0);
  ASSERT_EQ(run("decompose --archive " + arc + " --orders 2,3,4 --out " + (dir / "dec").string()), 0);
  EXPECT_EQ(first_line(dir / "dec" / "level_motion.csv"), "member,order,E_hat,delta");
  EXPECT_EQ(first_line(dir / "dec" / "delta_rms.csv"), "member,order,q,delta_rms");
  const auto summary = nlohmann::json::parse(slurp(dir / "dec" / "decompose_summary.json"));
  EXPECT_EQ(summary["format_version"], "egoe-run/1");
  EXPECT_EQ(summary["orders"].size(), 3u);
  EXPECT_EQ(summary["members"].size(), 3u);

  ASSERT_EQ(run("fluct --archive " + arc + " --orders 2,4 --out " + (dir / "fl").string()), 0);
  EXPECT_EQ(first_line(dir / "fl" / "nnsd.csv"), "s_low,s_high,density,wigner,poisson");
  EXPECT_EQ(first_line(dir / "fl" / "delta3.csv"), "L,delta3,goe,poisson");
  EXPECT_EQ(first_line(dir / "fl" / "periodogram.csv"), "member,order,frequency,power");
  EXPECT_EQ(first_line(dir / "fl" / "periodogram_summary.csv"),
            "k,order,mean_significance,mean_peak_frequency,members");
  const auto fl = nlohmann::json::parse(slurp(dir / "fl" / "fluct_summary.json"));
  EXPECT_TRUE(fl.contains("config"));
  EXPECT_TRUE(fl.contains("significance_convention"));

  ASSERT_EQ(run("analytic --statistics boson -m 20 -N 10 -k 2,3 --modes 2,3 --points 21 --out " +
                (dir / "an").string()),
            0);
  EXPECT_EQ(first_line(dir / "an" / "analytic_modes.csv"), "statistics,m,N,k,q,n,scale,E_hat,scaled_width");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli_exit");
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("generate -m 6 -N 12 -k 9 --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run("generate --members 0 --out " + (dir / "x").string()), 2);
  EXPECT_EQ(run("decompose --orders 2,9 --archive " + std::string(EGOE_CLI_PATH)), 2);
  EXPECT_EQ(run("analytic --statistics fermion -m 7 -N 13 -k 2"), 2);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{\"trim\": 3}";
  }
  EXPECT_EQ(run("generate --config " + (dir / "bad.json").string()), 2);
  // Unreadable archive contents: runtime failure.
  {
    std::ofstream junk(dir / "junk.egoearc");
    junk << "junk";
  }
  EXPECT_EQ(run("decompose --archive " + (dir / "junk.egoearc").string() + " --out " + dir.string()), 1);
  EXPECT_EQ(run("generate -m 6 -N 12 -k 2 --members 1 --out /proc/forbidden/x.egoearc"), 1);
}

TEST(Cli, ThreadsFromEnvironment) {
  const auto dir = scratch("cli_env");
  const std::string cmd = "EGOE_THREADS=2 " + std::string(EGOE_CLI_PATH) +
                          " generate -m 3 -N 6 -k 2 --members 2 --out " + (dir / "e.egoearc").string() +
                          " > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  const std::string bad = "EGOE_THREADS=zero " + std::string(EGOE_CLI_PATH) +
                          " generate -m 3 -N 6 -k 2 --members 2 --out " + (dir / "f.egoearc").string() +
                          " > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
