#include "autog/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <stdexcept>

#include "autog/util.hpp"

namespace autog {

Subprocess::Subprocess(std::vector<std::string> argv) {
  if (argv.empty()) throw IoError("subprocess: empty argv");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    throw IoError("subprocess: pipe() failed");
  }
  const int pid = fork();
  if (pid < 0) throw IoError("subprocess: fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (auto& arg : argv) args.push_back(arg.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

Subprocess::~Subprocess() {
  close_stdin();
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

void Subprocess::write_line(const std::string& line) {
  std::string payload = line;
  payload.push_back('\n');
  std::size_t written = 0;
  while (written < payload.size()) {
    const auto n = ::write(to_child_, payload.data() + written, payload.size() - written);
    if (n < 0) throw IoError("subprocess: write failed (child gone?)");
    written += static_cast<std::size_t>(n);
  }
}

bool Subprocess::read_line(std::string* line) {
  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      *line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return true;
    }
    char chunk[4096];
    const auto n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) throw IoError("subprocess: read failed");
    if (n == 0) {
      if (buffer_.empty()) return false;
      *line = buffer_;
      buffer_.clear();
      return true;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void Subprocess::close_stdin() {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
}

int Subprocess::wait() {
  close_stdin();
  int status = 0;
  if (pid_ > 0) {
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return -WTERMSIG(status);
  return status;
}

}  // namespace autog
