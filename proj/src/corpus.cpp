#include "consent_audit/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include "consent_audit/capture_io.hpp"

namespace consent_audit {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("error while writing " + path.string());
}

fs::path har_sidecar_path(const fs::path& har) {
  std::string name = har.filename().string();
  if (name.ends_with(kHarSuffix)) name.resize(name.size() - kHarSuffix.size());
  return har.parent_path() / (name + std::string(kHarMetaSuffix));
}

SiteCapture load_capture_file(const fs::path& path, std::vector<std::string>* warnings) {
  const std::string name = path.filename().string();
  if (name.ends_with(kHarSuffix)) {
    const fs::path sidecar = har_sidecar_path(path);
    std::error_code ec;
    if (!fs::exists(sidecar, ec)) {
      throw SchemaError("$", "missing sidecar " + sidecar.filename().string() + " for HAR file");
    }
    const HarMeta meta = parse_har_meta(read_file(sidecar));
    return import_har(read_file(path), meta, warnings);
  }
  return parse_capture(read_file(path), warnings);
}

std::vector<fs::path> list_capture_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  for (const fs::directory_entry& entry : it) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.ends_with(kCaptureSuffix) || name.ends_with(kHarSuffix)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  {
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct SiteOutcome {
  std::optional<SiteAudits> audits;
  std::string error;
};

}  // namespace

AuditReport analyze_captures(std::vector<SiteCapture> captures, const AuditConfig& cfg,
                             const AnalyzeOptions& options) {
  AuditReport report;
  report.config = cfg;

  std::map<std::string, std::vector<SiteCapture>> by_site;
  for (SiteCapture& c : captures) {
    report.generated_at = std::max(report.generated_at, c.capture_time);
    by_site[c.site_etld1].push_back(std::move(c));
  }
  std::vector<std::pair<const std::string, std::vector<SiteCapture>>*> groups;
  for (auto& entry : by_site) groups.push_back(&entry);

  std::vector<SiteOutcome> outcomes(groups.size());
  const std::size_t workers = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(groups.size(), 1));
  std::vector<CorpusAccumulator> partial(workers, CorpusAccumulator(cfg.analytics));
  // Contiguous slices keep every worker on its own accumulator.
  parallel_for(workers, workers, [&](std::size_t w) {
    const std::size_t begin = groups.size() * w / workers;
    const std::size_t end = groups.size() * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        outcomes[i].audits = audit_site(groups[i]->second, cfg.detection);
        partial[w].add(*outcomes[i].audits);
      } catch (const InconsistentSiteError& e) {
        if (options.strict) throw;
        outcomes[i].error = e.what();
      }
    }
  });

  CorpusAccumulator total(cfg.analytics);
  for (const CorpusAccumulator& acc : partial) total.merge(acc);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (outcomes[i].audits) {
      report.sites.push_back(std::move(*outcomes[i].audits));
    } else {
      report.skipped.push_back(groups[i]->first + ": " + outcomes[i].error);
    }
  }
  if (total.sites() == 0) throw EmptyCorpusError("no captures found");
  report.corpus = total.finish();
  return report;
}

AuditReport analyze_directory(const fs::path& dir, const AuditConfig& cfg,
                              const AnalyzeOptions& options) {
  const std::vector<fs::path> files = list_capture_files(dir);
  if (files.empty()) throw EmptyCorpusError("no captures found in " + dir.string());

  struct Loaded {
    std::optional<SiteCapture> capture;
    std::vector<std::string> warnings;
    std::string error;
  };
  std::vector<Loaded> loaded(files.size());
  parallel_for(files.size(), options.jobs, [&](std::size_t i) {
    const std::string where = files[i].string();
    try {
      loaded[i].capture = load_capture_file(files[i], &loaded[i].warnings);
    } catch (const SchemaError& e) {
      if (options.strict) throw SchemaError(where, e.what());
      loaded[i].error = where + ": " + e.what();
    } catch (const VersionError& e) {
      if (options.strict) throw VersionError(where + ": " + e.what());
      loaded[i].error = where + ": " + e.what();
    } catch (const ParseError& e) {
      if (options.strict) throw SchemaError(where, e.what());
      loaded[i].error = where + ": " + e.what();
    }
  });

  std::vector<SiteCapture> captures;
  std::vector<std::string> skipped;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < files.size(); ++i) {
    for (const std::string& w : loaded[i].warnings) warnings.push_back(files[i].string() + ": " + w);
    if (loaded[i].capture) {
      captures.push_back(std::move(*loaded[i].capture));
    } else {
      skipped.push_back(std::move(loaded[i].error));
    }
  }
  if (captures.empty()) {
    throw EmptyCorpusError("no captures found in " + dir.string() + " (" +
                           std::to_string(skipped.size()) + " unusable files)");
  }
  AuditReport report = analyze_captures(std::move(captures), cfg, options);
  skipped.insert(skipped.end(), report.skipped.begin(), report.skipped.end());
  report.skipped = std::move(skipped);
  report.warnings = std::move(warnings);
  return report;
}

}  // namespace consent_audit
