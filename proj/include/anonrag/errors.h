// Copyright 2026 The AnonRAG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ANONRAG_ERRORS_H_
#define ANONRAG_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anonrag {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

// Span list does not fit the text it is applied to.
class SpanError : public Error {
 public:
  using Error::Error;
};

// A remote call failed after all retry attempts.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempt" +
              (attempts == 1 ? "" : "s") + ")"),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class EmbeddingError : public Error {
 public:
  EmbeddingError(const std::string& what, std::vector<std::size_t> failed,
                 bool transport = false)
      : Error(what), failed_indices_(std::move(failed)), transport_(transport) {}
  const std::vector<std::size_t>& failed_indices() const {
    return failed_indices_;
  }
  // True when the endpoint stayed unreachable after all retries.
  bool transport() const { return transport_; }

 private:
  std::vector<std::size_t> failed_indices_;
  bool transport_;
};

// An anonymization method has no backend configured. Pipelines record the
// variant as skipped instead of failing the run.
class MethodUnavailable : public Error {
 public:
  using Error::Error;
};

// Requested temperature or endpoint setting is unusable.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class EmptyResultError : public Error {
 public:
  enum class Reason { kDocUnknown, kVariantMissing };
  EmptyResultError(const std::string& what, Reason reason)
      : Error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

// Judge output could not be turned into a JSON object.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Record file problem; line is 1-based, 0 when not line-specific.
class StoreError : public Error {
 public:
  StoreError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " at line " + std::to_string(line)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace anonrag

#endif  // ANONRAG_ERRORS_H_
