#pragma once

#include <stdexcept>
#include <string>

namespace qintent {

/// Bad input data: malformed records, violated preconditions on corpora,
/// out-of-vocabulary labels. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failures talking to a remote model endpoint. The CLI maps these to exit code 3.
class RemoteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyQuery : public DataError {
 public:
  EmptyQuery() : DataError("query is empty after normalization") {}
};

class InvalidUtf8 : public DataError {
 public:
  InvalidUtf8() : DataError("input is not valid UTF-8") {}
};

class QueryTooLong : public DataError {
 public:
  explicit QueryTooLong(std::size_t chars)
      : DataError("query has " + std::to_string(chars) + " characters, limit is 512") {}
};

class OutOfVocabularyLabel : public DataError {
 public:
  explicit OutOfVocabularyLabel(std::string raw)
      : DataError("out-of-vocabulary intent label: \"" + raw + "\""), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace qintent
