// consent-audit: audit consent-banner captures for ID leaking, ID
// synchronization and fingerprinting.
//
//   consent-audit analyze --captures DIR [--out FILE] [--format json|csv]
//   consent-audit validate FILE...
//   consent-audit gen-fixtures --out DIR [--seed N] [--sites N] [--profile P]
//   consent-audit self-check (REPORT | --captures DIR)
//
// Exit status: 0 success, 1 usage or validation error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "consent_audit/capture_io.hpp"
#include "consent_audit/config.hpp"
#include "consent_audit/corpus.hpp"
#include "consent_audit/fixtures.hpp"
#include "consent_audit/id_extraction.hpp"
#include "consent_audit/oracle.hpp"
#include "consent_audit/public_suffix.hpp"
#include "consent_audit/report.hpp"

namespace ca = consent_audit;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct CommonOptions {
  std::string config_file;
  std::string psl_file;
  std::optional<std::uint64_t> bucket_width;
  std::optional<std::size_t> extreme_tp;
  std::optional<std::size_t> extreme_sync;
};

void add_config_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--bucket-width", o.bucket_width, "rank bucket width (default 50000)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--extreme-tp", o.extreme_tp, "third-party count flag threshold (default 100)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--extreme-sync", o.extreme_sync,
                  "recipients-per-ID flag threshold (default 20)")
      ->check(CLI::PositiveNumber);
}

ca::AuditConfig effective_config(const CommonOptions& o) {
  ca::AuditConfig cfg = o.config_file.empty() ? ca::AuditConfig{} : ca::load_config(o.config_file);
  if (o.bucket_width) cfg.analytics.bucket_width = *o.bucket_width;
  if (o.extreme_tp) cfg.analytics.extreme_third_parties = *o.extreme_tp;
  if (o.extreme_sync) cfg.analytics.extreme_sync_recipients = *o.extreme_sync;
  return cfg;
}

void print_diagnostics(const ca::AuditReport& report) {
  for (const std::string& s : report.skipped) std::cerr << "skipped: " << s << "\n";
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_analyze(const std::string& captures, const std::string& out, const std::string& format,
                std::size_t jobs, bool strict, bool self_check, const CommonOptions& common) {
  const ca::AuditConfig cfg = effective_config(common);
  const ca::AuditReport report = ca::analyze_directory(captures, cfg, {jobs, strict});
  print_diagnostics(report);
  if (self_check) {
    const auto problems = ca::self_check_report(ca::to_json(report));
    for (const std::string& p : problems) std::cerr << "self-check: " << p << "\n";
    if (!problems.empty()) return kExitInvalid;
  }
  if (format == "csv") {
    for (const fs::path& p : ca::write_csv_tables(report.corpus, out)) {
      std::cerr << "wrote " << p.string() << "\n";
    }
  } else if (out.empty() || out == "-") {
    std::cout << ca::report_to_string(report);
  } else {
    ca::write_file(out, ca::report_to_string(report));
  }
  std::cerr << report.sites.size() << " sites, " << report.skipped.size() << " skipped\n";
  return kExitOk;
}

int cmd_validate(const std::vector<std::string>& files) {
  int status = kExitOk;
  for (const std::string& file : files) {
    try {
      std::vector<std::string> warnings;
      const ca::SiteCapture capture = ca::load_capture_file(file, &warnings);
      for (const std::string& w : warnings) std::cerr << file << ": warning: " << w << "\n";
      std::cout << file << ": ok (" << capture.site_etld1 << ", "
                << ca::to_string(capture.consent_action) << ", " << capture.requests.size()
                << " requests)\n";
    } catch (const ca::IoError& e) {
      std::cerr << e.what() << "\n";
      status = std::max(status, kExitIo);
    } catch (const ca::AuditError& e) {
      std::cerr << file << ": " << e.what() << "\n";
      status = std::max(status, kExitInvalid);
    }
  }
  return status;
}

int cmd_gen_fixtures(std::uint64_t seed, std::size_t sites, const std::string& profile_name,
                     const std::string& out) {
  const auto profile = ca::parse_fixture_profile(profile_name);
  if (!profile) throw CLI::ValidationError("--profile", "expected basic or edge-cases");
  const ca::FixtureCorpus corpus = ca::generate_fixtures(seed, sites, *profile);
  const auto written = ca::write_fixture_corpus(corpus, out);
  std::cerr << "wrote " << written.size() << " files to " << out << "\n";
  return kExitOk;
}

// Cross-checks the detector against the brute-force oracle on every capture
// of a directory, then the corpus section of the resulting report.
int self_check_captures(const std::string& dir, std::size_t oracle_limit,
                        const CommonOptions& common) {
  const ca::AuditConfig cfg = effective_config(common);
  std::vector<std::string> problems;
  std::size_t checked = 0;
  for (const fs::path& file : ca::list_capture_files(dir)) {
    ca::SiteCapture capture;
    try {
      capture = ca::load_capture_file(file);
    } catch (const ca::IoError&) {
      throw;
    } catch (const ca::AuditError& e) {
      std::cerr << "skipped: " << file.string() << ": " << e.what() << "\n";
      continue;
    }
    const auto ids = ca::candidate_ids(capture, cfg.detection.filter);
    auto fast = ca::detect_leaks(capture, ids, cfg.detection.filter);
    auto slow = ca::oracle::detect_leaks(capture, ids, cfg.detection.filter);
    std::sort(fast.begin(), fast.end(), ca::event_order);
    std::sort(slow.begin(), slow.end(), ca::event_order);
    if (fast != slow) {
      problems.push_back(file.string() + ": detector found " + std::to_string(fast.size()) +
                         " events, oracle " + std::to_string(slow.size()));
    }
    ++checked;
  }
  const ca::AuditReport report = ca::analyze_directory(dir, cfg, {});
  for (const std::string& p : ca::self_check_report(ca::to_json(report), oracle_limit)) {
    problems.push_back(p);
  }
  for (const std::string& p : problems) std::cerr << "self-check: " << p << "\n";
  std::cout << "self-check: " << checked << " captures, " << report.sites.size() << " sites, "
            << problems.size() << " problems\n";
  if (report.sites.size() > oracle_limit) {
    std::cout << "self-check: corpus larger than --oracle-limit; oracle aggregation skipped\n";
  }
  return problems.empty() ? kExitOk : kExitInvalid;
}

int self_check_report_file(const std::string& file, std::size_t oracle_limit) {
  const nlohmann::json doc = nlohmann::json::parse(ca::read_file(file), nullptr, false);
  if (doc.is_discarded()) {
    std::cerr << file << ": not valid JSON\n";
    return kExitInvalid;
  }
  const auto problems = ca::self_check_report(doc, oracle_limit);
  for (const std::string& p : problems) std::cerr << "self-check: " << p << "\n";
  std::cout << "self-check: " << file << ": " << problems.size() << " problems\n";
  return problems.empty() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit consent-banner captures for ID leaking, ID synchronization and "
               "fingerprinting"};
  app.set_version_flag("--version", std::string(CONSENT_AUDIT_VERSION));
  app.require_subcommand(1);
  std::string psl_file;
  app.add_option("--psl", psl_file,
                 "public suffix list file (overrides $CONSENT_AUDIT_PSL and the bundled copy)")
      ->check(CLI::ExistingFile);

  CommonOptions common;

  CLI::App* analyze = app.add_subcommand("analyze", "audit a directory of captures");
  std::string captures_dir;
  std::string out;
  std::string format = "json";
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  bool strict = false;
  bool analyze_self_check = false;
  analyze->add_option("--captures", captures_dir, "directory of *.capture.json / *.har files")
      ->required();
  analyze->add_option("--out", out, "report file (json, default stdout) or directory (csv)");
  analyze->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  analyze->add_flag("--strict", strict, "fail on the first unusable file");
  analyze->add_flag("--self-check", analyze_self_check,
                    "verify the corpus section against the per-site section before writing");
  add_config_options(analyze, common);

  CLI::App* validate = app.add_subcommand("validate", "check capture files against the schema");
  std::vector<std::string> validate_files;
  validate->add_option("files", validate_files, "capture or HAR files")->required();

  CLI::App* gen = app.add_subcommand("gen-fixtures", "write a synthetic corpus and manifest");
  std::uint64_t seed = 1;
  std::size_t sites = 10;
  std::string profile = "basic";
  std::string gen_out;
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--sites", sites, "number of sites")->check(CLI::PositiveNumber);
  gen->add_option("--profile", profile, "basic or edge-cases")
      ->check(CLI::IsMember({"basic", "edge-cases"}));
  gen->add_option("--out", gen_out, "output directory")->required();

  CLI::App* check = app.add_subcommand("self-check", "recompute a report or corpus with the oracles");
  std::string report_file;
  std::string check_captures;
  std::size_t oracle_limit = ca::kDefaultOracleSiteLimit;
  auto* report_opt = check->add_option("report", report_file, "report JSON to verify");
  auto* captures_opt =
      check->add_option("--captures", check_captures, "capture directory to cross-check");
  report_opt->excludes(captures_opt);
  check->add_option("--oracle-limit", oracle_limit,
                    "largest corpus (sites) aggregated by the oracle");
  add_config_options(check, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (!psl_file.empty()) {
      ca::install_public_suffix_list(ca::PublicSuffixList::from_file(psl_file));
    }
    if (analyze->parsed()) {
      if (format == "csv" && out.empty()) {
        std::cerr << "analyze: --format csv needs --out DIR\n";
        return kExitInvalid;
      }
      return cmd_analyze(captures_dir, out, format, jobs, strict, analyze_self_check, common);
    }
    if (validate->parsed()) return cmd_validate(validate_files);
    if (gen->parsed()) return cmd_gen_fixtures(seed, sites, profile, gen_out);
    if (check->parsed()) {
      if (!check_captures.empty()) return self_check_captures(check_captures, oracle_limit, common);
      if (!report_file.empty()) return self_check_report_file(report_file, oracle_limit);
      std::cerr << "self-check: give a report file or --captures DIR\n";
      return kExitInvalid;
    }
  } catch (const ca::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ca::AuditError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
