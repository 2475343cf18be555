// Copyright 2026 The nvcodec Authors
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

#ifndef NVCODEC_ERRORS_H_
#define NVCODEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace nvcodec {

// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed container or stream (WAV, NVC1, NVW1, manifest, feature dump).
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRateError : public Error {
 public:
  explicit UnsupportedRateError(int rate_hz)
      : Error("unsupported sample rate " + std::to_string(rate_hz) +
              " Hz (engine requires 16000 Hz)"),
        rate_hz_(rate_hz) {}
  int rate_hz() const { return rate_hz_; }

 private:
  int rate_hz_;
};

// Dimension or shape mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A WeightSet lacks a tensor required by the requested operation.
class MissingTensorError : public Error {
 public:
  explicit MissingTensorError(const std::string& name)
      : Error("missing tensor: " + name), name_(name) {}
  // `name` is the first missing tensor; `message` may list all of them.
  MissingTensorError(const std::string& name, const std::string& message)
      : Error(message), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Invalid argument values (bad config, out-of-range parameter).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvcodec

#endif  // NVCODEC_ERRORS_H_
