// Copyright 2026 The nlab Authors
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

#ifndef NLAB_ERROR_HPP
#define NLAB_ERROR_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace nlab {

enum class ErrorKind {
    kDimensionMismatch,
    kInvariantViolation,
    kDomain,
    kParse,
};

inline const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kDimensionMismatch:
            return "dimension mismatch";
        case ErrorKind::kInvariantViolation:
            return "invariant violation";
        case ErrorKind::kDomain:
            return "domain error";
        case ErrorKind::kParse:
            return "parse error";
    }
    return "error";
}

/// Every failure raised by the library. `invariant` names the violated
/// property (e.g. "completeness") and `residual` carries the measured
/// deviation when there is one, otherwise 0.
class NlabError : public std::runtime_error {
   public:
    NlabError(ErrorKind kind, std::string invariant, const std::string &message, double residual = 0.0)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + invariant + ": " + message),
          kind_(kind),
          invariant_(std::move(invariant)),
          residual_(residual) {
    }

    ErrorKind kind() const {
        return kind_;
    }
    const std::string &invariant() const {
        return invariant_;
    }
    double residual() const {
        return residual_;
    }

   private:
    ErrorKind kind_;
    std::string invariant_;
    double residual_;
};

[[noreturn]] inline void throw_dimension_mismatch(const std::string &what) {
    throw NlabError(ErrorKind::kDimensionMismatch, "dimensions", what);
}

[[noreturn]] inline void throw_violation(const std::string &invariant, const std::string &what, double residual) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", residual);
    throw NlabError(ErrorKind::kInvariantViolation, invariant, what + " (residual " + buf + ")", residual);
}

[[noreturn]] inline void throw_domain(const std::string &invariant, const std::string &what) {
    throw NlabError(ErrorKind::kDomain, invariant, what);
}

}  // namespace nlab

#endif
