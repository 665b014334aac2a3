#include "subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "peerlex/errors.hpp"

extern char** environ;

namespace peerlex {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return left.count() < 0 ? 0 : static_cast<int>(std::min<long long>(left.count(), 1 << 30));
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

}  // namespace

Subprocess::Subprocess(const std::string& command) {
  ignore_sigpipe();
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  // Own process group, so kill() also reaches whatever the shell started.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, &attr,
                               const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw Error("cannot start '" + command + "': " + std::strerror(rc));
  }
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
  set_nonblocking(in_fd_);
  set_nonblocking(out_fd_);
}

Subprocess::~Subprocess() {
  if (in_fd_ >= 0) ::close(in_fd_);
  if (!exited_) {
    if (!wait(std::chrono::steady_clock::now() + std::chrono::milliseconds(200))) {
      kill();
    }
  }
  if (out_fd_ >= 0) ::close(out_fd_);
}

void Subprocess::send(std::string_view data) {
  if (in_fd_ < 0) throw Error("stdin of child already closed");
  pending_.append(data);
  flush_some();
}

bool Subprocess::flush_some() {
  while (!pending_.empty() && !write_broken_) {
    const ssize_t n = ::write(in_fd_, pending_.data(), pending_.size());
    if (n > 0) {
      pending_.erase(0, static_cast<std::size_t>(n));
    } else if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      return false;
    } else if (n < 0 && errno == EINTR) {
      continue;
    } else {
      // EPIPE: the child stopped reading. Its exit shows up on the read side.
      write_broken_ = true;
      pending_.clear();
    }
  }
  return true;
}

Subprocess::ReadStatus Subprocess::read_line(std::string& line,
                                             std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line.assign(buffer_, 0, nl);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      buffer_.erase(0, nl + 1);
      return ReadStatus::line;
    }
    if (eof_) {
      if (!buffer_.empty()) {
        line = std::move(buffer_);
        buffer_.clear();
        return ReadStatus::line;
      }
      return ReadStatus::eof;
    }
    pollfd fds[2];
    nfds_t count = 0;
    fds[count++] = {out_fd_, POLLIN, 0};
    const bool want_write = in_fd_ >= 0 && !pending_.empty() && !write_broken_;
    if (want_write) fds[count++] = {in_fd_, POLLOUT, 0};
    const int timeout = remaining_ms(deadline);
    const int ready = ::poll(fds, count, timeout);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) return ReadStatus::timeout;
    if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) flush_some();
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char chunk[8192];
      const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
      if (n > 0) {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      } else if (n == 0) {
        eof_ = true;
      } else if (errno != EAGAIN && errno != EINTR) {
        eof_ = true;
      }
    }
  }
}

void Subprocess::close_stdin(std::chrono::steady_clock::time_point deadline) {
  if (in_fd_ < 0) return;
  while (!pending_.empty() && !write_broken_) {
    if (flush_some()) break;
    pollfd fd{in_fd_, POLLOUT, 0};
    if (::poll(&fd, 1, remaining_ms(deadline)) <= 0) break;
  }
  ::close(in_fd_);
  in_fd_ = -1;
}

std::optional<int> Subprocess::wait(std::chrono::steady_clock::time_point deadline) {
  if (exited_) return status_;
  for (;;) {
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      exited_ = true;
      status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      return status_;
    }
    if (r < 0 && errno != EINTR) {
      exited_ = true;
      status_ = -1;
      return status_;
    }
    if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

void Subprocess::kill() {
  if (exited_ || pid_ <= 0) return;
  ::kill(-pid_, SIGKILL);
  ::kill(pid_, SIGKILL);
  int status = 0;
  ::waitpid(pid_, &status, 0);
  exited_ = true;
  status_ = -1;
}

}  // namespace peerlex
