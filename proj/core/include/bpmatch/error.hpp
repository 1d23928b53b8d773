#ifndef BPMATCH_ERROR_HPP
#define BPMATCH_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpmatch {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list or config input. Carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t line_;
  std::string detail_;
};

/// A file could not be opened, read or written.
class io_error : public error {
public:
  using error::error;
};

/// A caller violated an operation's precondition.
class precondition_error : public error {
public:
  using error::error;
};

/// Instance exceeds a configured size limit (oracle edge limit, tree cap).
class size_limit_error : public error {
public:
  using error::error;
};

/// An internal invariant broke. Seeing one of these means a bug, either in
/// this library or in the caller that assembled its inputs.
class structural_error : public error {
public:
  using error::error;
};

} // namespace bpmatch

#endif
