#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfkit {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration supplied by the caller.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Problems with the input data: unreadable files, malformed lines, empty sets.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  IoError(const std::string& path, const std::string& what)
      : DataError(path + ": " + what), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  // 1-based.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public DataError {
 public:
  EmptyDatasetError() : DataError("dataset contains no ratings") {}
};

class EmptyTestSetError : public DataError {
 public:
  EmptyTestSetError() : DataError("model has no test users") {}
};

class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A pipeline step ran before the step that produces its input.
class PipelineOrderError : public Error {
 public:
  PipelineOrderError(const std::string& missing_key, const std::string& step)
      : Error("missing \"" + missing_key + "\" in store; run the " + step +
              " step first"),
        missing_key_(missing_key) {}

  const std::string& missing_key() const { return missing_key_; }

 private:
  std::string missing_key_;
};

class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(int epoch, double learning_rate)
      : Error("training diverged at epoch " + std::to_string(epoch) +
              " (learning rate " + std::to_string(learning_rate) + ")"),
        epoch_(epoch),
        learning_rate_(learning_rate) {}

  int epoch() const { return epoch_; }
  double learning_rate() const { return learning_rate_; }

 private:
  int epoch_;
  double learning_rate_;
};

}  // namespace cfkit
