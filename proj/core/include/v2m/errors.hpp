#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace v2m {

/// Error codes for every failure mode the library reports. Grouped by the
/// subsystem that raises them.
enum class Errc {
  // dataset
  MissingColumn,
  ParseError,
  EmptyFile,
  InvalidProfile,
  ZeroVarianceFeature,
  TooFewDistinctPoints,
  DimensionMismatch,
  ClassTooSmall,
  // models
  SingleClassTrainingSet,
  InvalidHyperparameter,
  NonFiniteInput,
  EmptyTestSet,
  // cgan
  InvalidConfig,
  ScoreOutOfRange,
  NonFiniteGradient,
  // adversary
  InsufficientRealData,
  NoLowPrototypes,
  // evaluation
  EmptyVictimSet,
  ZeroOriginalTnr,
  // general
  InvalidArgument,
  Io,
};

std::string_view to_string(Errc code);

/// Single exception type carrying a code and the raising module's name.
/// Messages are prefixed "module: text" so CLI output identifies the stage.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string_view module, const std::string& message)
      : std::runtime_error(std::string(module) + ": " + message),
        code_(code),
        module_(module) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  std::string module_;
};

[[noreturn]] inline void fail(Errc code, std::string_view module,
                              const std::string& message) {
  throw Error(code, module, message);
}

}  // namespace v2m
