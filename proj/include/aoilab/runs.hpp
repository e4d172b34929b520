#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <string>

#include "aoilab/io.hpp"
#include "aoilab/metrics.hpp"

namespace aoilab {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// One line of the append-only results log.
struct RunRecord {
  std::string instance_id;
  std::string policy;  // a policy id or "oracle"
  AoiReport report;
  std::string trace_path;
  std::string timestamp;
  std::string tool_version{kToolVersion};

  io::json to_json() const {
    io::json doc;
    doc["instance_id"] = instance_id;
    doc["policy"] = policy;
    doc["report"] = io::report_json(report);
    doc["trace_path"] = trace_path;
    doc["timestamp"] = timestamp;
    doc["tool_version"] = tool_version;
    return doc;
  }
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Newline-delimited JSON log `runs.ndjson` inside an output directory.
/// Appends hold an exclusive flock on the file, so concurrent writers
/// (threads or processes) never interleave lines.
class ResultsLog {
 public:
  explicit ResultsLog(std::filesystem::path dir) : path_(std::move(dir) / "runs.ndjson") {
    std::filesystem::create_directories(path_.parent_path());
  }

  const std::filesystem::path& path() const { return path_; }

  void append(const RunRecord& record) {
    std::string line = record.to_json().dump() + "\n";
    std::lock_guard<std::mutex> guard(mutex_);
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot open " + path_.string());
    ::flock(fd, LOCK_EX);
    std::size_t written = 0;
    while (written < line.size()) {
      ssize_t k = ::write(fd, line.data() + written, line.size() - written);
      if (k <= 0) break;
      written += static_cast<std::size_t>(k);
    }
    ::flock(fd, LOCK_UN);
    ::close(fd);
    if (written != line.size()) throw Error(ErrorCode::IoError, "short write to " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

}  // namespace aoilab
