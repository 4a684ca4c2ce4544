// Copyright 2026 The cachebeam Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CACHEBEAM_ERROR_HPP
#define CACHEBEAM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cachebeam {

enum class ErrorCode {
  domain,           // argument outside the mathematical domain
  config,           // malformed or inconsistent configuration
  non_convergence,  // quadrature / root finding / bisection did not converge
  cap_exceeded,     // exact evaluation requested beyond the supported order
  infeasible,       // constraint set is empty (e.g. ZF with L < K)
  io,
  internal,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// the C API and the CLI can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) raise(code, what);
}

}  // namespace cachebeam

#endif  // CACHEBEAM_ERROR_HPP
