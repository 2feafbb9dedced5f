#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fraktur_bench {

// Base for every data error the toolkit reports. `kind` is a stable
// machine-readable tag, `details` carries one entry per offending item.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, std::vector<std::string> details = {})
      : std::runtime_error(message), kind_(std::move(kind)), details_(std::move(details)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::string kind_;
  std::vector<std::string> details_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& message) : Error("encoding", message) {}
};

class CodecError : public Error {
 public:
  explicit CodecError(const std::string& message, std::vector<std::string> details = {})
      : Error("codec", message, std::move(details)) {}
};

class RuleError : public Error {
 public:
  explicit RuleError(const std::string& message, std::vector<std::string> details = {})
      : Error("rules", message, std::move(details)) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& message, std::vector<std::string> details = {})
      : Error("evaluation", message, std::move(details)) {}
};

class VotingError : public Error {
 public:
  explicit VotingError(const std::string& message, std::vector<std::string> details = {})
      : Error("voting", message, std::move(details)) {}
};

class ManifestError : public Error {
 public:
  explicit ManifestError(const std::string& message, std::vector<std::string> details = {})
      : Error("manifest", message, std::move(details)) {}
};

class ReportError : public Error {
 public:
  explicit ReportError(const std::string& message) : Error("report", message) {}
};

}  // namespace fraktur_bench
