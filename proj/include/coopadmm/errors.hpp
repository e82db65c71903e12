/*
 * Copyright 2026 The coopadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COOPADMM_ERRORS_HPP
#define COOPADMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coopadmm {

/// Dynamics evaluated outside its kinematic validity region.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or scenario data.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Q_uu (plus regularization) failed a positive-definite factorization.
class NotPositiveDefinite : public std::runtime_error {
public:
  explicit NotPositiveDefinite(const std::string &msg)
      : std::runtime_error(msg) {}
};

/// Rank-1 extraction could not repair any sample to feasibility.
class ExtractionFailed : public std::runtime_error {
public:
  explicit ExtractionFailed(const std::string &msg)
      : std::runtime_error(msg) {}
};

/// A projection back-end failed; carries the failing timestep in the message.
class BackendFailure : public std::runtime_error {
public:
  explicit BackendFailure(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace coopadmm

#endif // COOPADMM_ERRORS_HPP
