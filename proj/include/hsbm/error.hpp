#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsbm {

/// Malformed input data (interaction files, community files, CSV tables).
class ParseError : public std::runtime_error
{
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
  {
  }
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Eigenvalue selection did not isolate the requested number of signal
/// eigenvalues.
class SelectionError : public std::runtime_error
{
public:
  SelectionError(std::size_t found, std::size_t wanted)
      : std::runtime_error("eigenvalue selection found " + std::to_string(found) +
                           " eigenvalues outside the bulk intervals, expected " +
                           std::to_string(wanted)),
        found_(found), wanted_(wanted)
  {
  }
  std::size_t found() const { return found_; }
  std::size_t wanted() const { return wanted_; }

private:
  std::size_t found_;
  std::size_t wanted_;
};

} // namespace hsbm
