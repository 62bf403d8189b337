#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace schreier {

/// Base for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs live in different spaces (generator sets or alphabets disagree).
class incomparable_error : public error {
 public:
  using error::error;
};

/// A graph, coloring or document breaks a structural invariant.
class validation_error : public error {
 public:
  explicit validation_error(std::vector<std::string> violations)
      : error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) {
      out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// An exhaustive search hit its node-expansion cap.
class budget_exceeded : public error {
 public:
  budget_exceeded(const std::string& what, std::size_t expansions, std::size_t completed_half_length)
      : error(what), expansions_(expansions), completed_half_length_(completed_half_length) {}

  std::size_t expansions() const noexcept { return expansions_; }
  /// Largest half-length for which the search finished before running out.
  std::size_t completed_half_length() const noexcept { return completed_half_length_; }

 private:
  std::size_t expansions_;
  std::size_t completed_half_length_;
};

/// A word walked off a truncated graph.
class boundary_error : public error {
 public:
  using error::error;
};

}  // namespace schreier
