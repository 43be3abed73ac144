#ifndef CONSENT_AUDIT_CORPUS_HPP_
#define CONSENT_AUDIT_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "consent_audit/config.hpp"
#include "consent_audit/report.hpp"
#include "consent_audit/types.hpp"

namespace consent_audit {

inline constexpr std::string_view kCaptureSuffix = ".capture.json";
inline constexpr std::string_view kHarSuffix = ".har";
inline constexpr std::string_view kHarMetaSuffix = ".meta.json";

// "<dir>/<stem>.meta.json" for "<dir>/<stem>.har".
std::filesystem::path har_sidecar_path(const std::filesystem::path& har);

// Reads one capture file: a canonical capture document, or a HAR log
// together with its sidecar. Throws IoError when a file cannot be read,
// SchemaError for a missing sidecar or a schema violation, VersionError.
SiteCapture load_capture_file(const std::filesystem::path& path,
                              std::vector<std::string>* warnings = nullptr);

// Capture and HAR files under `dir` (recursive), sorted by path.
// Throws IoError when `dir` is not a readable directory.
std::vector<std::filesystem::path> list_capture_files(const std::filesystem::path& dir);

// Runs fn(0) .. fn(n - 1) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct AnalyzeOptions {
  std::size_t jobs = 1;
  // Fail on the first unusable file or site instead of skipping it.
  bool strict = false;
};

// Loads every capture under `dir`, audits each site and aggregates the
// corpus. Unusable files are listed in AuditReport::skipped unless strict.
// Throws IoError, SchemaError (strict mode, message names the file),
// InconsistentSiteError (strict mode) or EmptyCorpusError ("no captures
// found") when nothing usable remains.
AuditReport analyze_directory(const std::filesystem::path& dir, const AuditConfig& cfg,
                              const AnalyzeOptions& options = {});

// Same as analyze_directory() for captures already in memory.
AuditReport analyze_captures(std::vector<SiteCapture> captures, const AuditConfig& cfg,
                             const AnalyzeOptions& options = {});

// Throws IoError.
std::string read_file(const std::filesystem::path& path);
// Creates parent directories as needed. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace consent_audit

#endif  // CONSENT_AUDIT_CORPUS_HPP_
