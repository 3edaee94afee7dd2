#ifndef OATLAS_ERRORS_H_
#define OATLAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace oatlas {

// Broad failure classes. The command-line tool maps each one to its own exit
// code.
enum class ErrorKind {
  kConfig,
  kData,
  kModel,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &message)
      : Error(ErrorKind::kConfig, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string &message)
      : Error(ErrorKind::kData, message) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string &message)
      : Error(ErrorKind::kModel, message) {}
};

// Strict mode aborts on the first malformed row; lenient mode skips it and
// counts it.
enum class ParseMode {
  kStrict,
  kLenient,
};

}  // namespace oatlas

#endif  // OATLAS_ERRORS_H_
