#pragma once

#include <stdexcept>
#include <string>

namespace payattr {

// Every error carries a module prefix ("corpus: ...") so CLI diagnostics
// identify where a failure originated.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

#define PAYATTR_DEFINE_ERROR(Name, Module)                                    \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& message) : Error(Module, message) {}     \
  }

PAYATTR_DEFINE_ERROR(ParseError, "corpus");
PAYATTR_DEFINE_ERROR(IoError, "io");

PAYATTR_DEFINE_ERROR(HttpError, "harvest");
PAYATTR_DEFINE_ERROR(MalformedPage, "harvest");
PAYATTR_DEFINE_ERROR(UserNotFound, "harvest");
PAYATTR_DEFINE_ERROR(UnknownUsername, "harvest");
PAYATTR_DEFINE_ERROR(PatternNotFound, "harvest");
PAYATTR_DEFINE_ERROR(Interrupted, "harvest");
PAYATTR_DEFINE_ERROR(BindError, "harvest");

PAYATTR_DEFINE_ERROR(EmptyProfile, "features");

PAYATTR_DEFINE_ERROR(EmptyCorpus, "vectorize");
PAYATTR_DEFINE_ERROR(DimensionMismatch, "vectorize");

PAYATTR_DEFINE_ERROR(UnknownRegion, "label");
PAYATTR_DEFINE_ERROR(MissingLabelFile, "label");

PAYATTR_DEFINE_ERROR(SingleClass, "model");
PAYATTR_DEFINE_ERROR(NonFinite, "model");
PAYATTR_DEFINE_ERROR(VersionError, "model");
PAYATTR_DEFINE_ERROR(CorruptError, "model");

PAYATTR_DEFINE_ERROR(TooFewSamples, "eval");
PAYATTR_DEFINE_ERROR(ConfigError, "eval");

PAYATTR_DEFINE_ERROR(InvalidSpec, "synth");

#undef PAYATTR_DEFINE_ERROR

}  // namespace payattr
