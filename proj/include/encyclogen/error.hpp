#pragma once

#include <stdexcept>
#include <string>

namespace encyclogen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (missing paths, tokenizer mismatch, out-of-range parameters).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Input data that cannot be read or parsed.
class DataError : public Error {
  public:
    using Error::Error;
};

class TrainingError : public Error {
  public:
    using Error::Error;
};

/// A region produced no usable fragment under any extraction rule.
class ExtractionError : public Error {
  public:
    using Error::Error;
};

/// Text with no token the model can score.
class UnscorableError : public Error {
  public:
    using Error::Error;
};

}  // namespace encyclogen
