#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace peerlex {

// Child process with piped stdin/stdout, spawned through /bin/sh -c. Writes
// are buffered and flushed from read_line() so the host never blocks on a
// full pipe while the child is blocked writing its answers.
class Subprocess {
 public:
  enum class ReadStatus { line, eof, timeout };

  explicit Subprocess(const std::string& command);
  ~Subprocess();
  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  void send(std::string_view data);
  ReadStatus read_line(std::string& line, std::chrono::steady_clock::time_point deadline);
  // Flushes what it can before closing.
  void close_stdin(std::chrono::steady_clock::time_point deadline);
  // Exit status, or nullopt if still running at the deadline.
  std::optional<int> wait(std::chrono::steady_clock::time_point deadline);
  void kill();
  bool exited() const noexcept { return exited_; }

 private:
  bool flush_some();

  pid_t pid_ = -1;
  int in_fd_ = -1;   // child's stdin
  int out_fd_ = -1;  // child's stdout
  std::string pending_;
  std::string buffer_;
  bool eof_ = false;
  bool write_broken_ = false;
  bool exited_ = false;
  int status_ = 0;
};

}  // namespace peerlex
