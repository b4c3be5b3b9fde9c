#pragma once

#include <string>
#include <vector>

namespace autog {

/// Line-oriented bidirectional pipe to a child process. Used for the
/// newline-delimited JSON wire protocols (external embedders and oracles).
class Subprocess {
 public:
  explicit Subprocess(std::vector<std::string> argv);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  void write_line(const std::string& line);
  /// Blocks until a full line or EOF. Returns false on EOF.
  bool read_line(std::string* line);
  void close_stdin();
  /// Waits for exit; returns the exit status (or -signal).
  int wait();

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace autog
