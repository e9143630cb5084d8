#pragma once

#include <stdexcept>
#include <string>

namespace peakpoint {

/// Malformed input file; `path()` names the offending key, e.g. "$.generator.beta".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A numerical pipeline step could not complete; `module()` names the step.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

class HorizonExceeded : public PipelineError {
 public:
  HorizonExceeded(int n, int horizon)
      : PipelineError("domain", "horizon exceeded: annulus " + std::to_string(n) +
                                    " > horizon " + std::to_string(horizon)) {}
};

}  // namespace peakpoint
