#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace botsim {

// Base of every error raised by the toolkit. code() is a stable,
// machine-readable identifier used by the CLI and HTTP layers.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define BOTSIM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

// bot-def
BOTSIM_DEFINE_ERROR(SchemaError)
BOTSIM_DEFINE_ERROR(ValidationError)
BOTSIM_DEFINE_ERROR(UnknownAdaptor)
BOTSIM_DEFINE_ERROR(AdaptorError)
// conv-graph
BOTSIM_DEFINE_ERROR(UnknownNode)
// dam-infer
BOTSIM_DEFINE_ERROR(NoMessages)
BOTSIM_DEFINE_ERROR(UnknownAct)
// goal-gen
BOTSIM_DEFINE_ERROR(MissingOntologyValue)
// paraphrase
BOTSIM_DEFINE_ERROR(ProviderUnavailable)
BOTSIM_DEFINE_ERROR(EmptyUtterance)
BOTSIM_DEFINE_ERROR(ScorerUnavailable)
BOTSIM_DEFINE_ERROR(LengthMismatch)
// simulator
BOTSIM_DEFINE_ERROR(RuleMissing)
BOTSIM_DEFINE_ERROR(TemplateMissing)
BOTSIM_DEFINE_ERROR(PlaceholderUnfilled)
BOTSIM_DEFINE_ERROR(ConnectorError)
// mockbot
BOTSIM_DEFINE_ERROR(ProfileInvalid)
BOTSIM_DEFINE_ERROR(SessionClosed)
// remediator
BOTSIM_DEFINE_ERROR(EmptySession)
BOTSIM_DEFINE_ERROR(UnknownLabel)
BOTSIM_DEFINE_ERROR(MissingProvenance)
BOTSIM_DEFINE_ERROR(UnknownSuggestion)
// service-store
BOTSIM_DEFINE_ERROR(NotFound)
BOTSIM_DEFINE_ERROR(VersionConflict)
// Precondition violated by the caller.
BOTSIM_DEFINE_ERROR(ContractError)

#undef BOTSIM_DEFINE_ERROR

}  // namespace botsim
