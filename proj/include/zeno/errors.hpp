#pragma once

#include <stdexcept>
#include <string>

namespace zeno {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A state whose norm has drifted away from one.
class InvalidState : public Error {
 public:
  using Error::Error;
};

enum class Edge { Lower, Upper };

/// Probability is about to leave the truncated basis window.
class TruncationOverflow : public Error {
 public:
  TruncationOverflow(Edge edge, long edge_index, double occupation)
      : Error(describe(edge, edge_index, occupation)), edge_(edge), edge_index_(edge_index) {}

  Edge edge() const noexcept { return edge_; }
  long edge_index() const noexcept { return edge_index_; }

 private:
  static std::string describe(Edge edge, long edge_index, double occupation) {
    return std::string(edge == Edge::Lower ? "lower" : "upper") + " edge of the basis window (m = " +
           std::to_string(edge_index) + ") holds occupation " + std::to_string(occupation) +
           "; widen the window (window_halfwidth)";
  }

  Edge edge_;
  long edge_index_;
};

/// Occupation profile does not decay away from m0.
class NoLocalization : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(key), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string out = "config";
    if (line > 0) out += " line " + std::to_string(line);
    if (!key.empty()) out += " key '" + key + "'";
    return out + ": " + what;
  }

  std::string key_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace zeno
