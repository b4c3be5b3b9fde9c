#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace autog {

/// Error with an optional source position, thrown by parsers and loaders.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line = -1, int column = -1)
      : std::runtime_error(format(message, line, column)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column);
  int line_;
  int column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded helpers built on mt19937_64 directly. std::uniform_int_distribution
// is not byte-portable across standard libraries, so sampling goes through
// bounded_uint and frozen test values stay valid everywhere.
std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t bound);
double unit_real(std::mt19937_64& rng);

/// k distinct indices from [0, n), in draw order. k > n yields all n shuffled.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng);

template <typename T>
void shuffle_inplace(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded_uint(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t value);

/// "1st", "2nd", "3rd", "4th", ..., "11th", "21st", ...
std::string ordinal(std::size_t n);

std::string format_double(double value, int decimals);

bool is_identifier(const std::string& name);

std::vector<std::string> split(const std::string& text, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::string trim(const std::string& text);

bool starts_with(const std::string& text, const std::string& prefix);
bool ends_with(const std::string& text, const std::string& suffix);

}  // namespace autog
