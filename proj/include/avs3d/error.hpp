// Copyright 2026 The avs3d Authors
//
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace avs3d {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unusable input data: unparseable files, inconsistent dimensions, bad specs.
/// CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage cannot produce a result from otherwise valid inputs.
/// CLI exit code 3.
class PipelineError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (missing path, unwritable directory). CLI exit code 4.
class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : InputError(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    explicit ParseError(const std::string& what) : InputError(what), offset(0) {}

    std::size_t offset;
};

class MissingProperty : public InputError {
public:
    explicit MissingProperty(const std::string& property_name)
        : InputError("missing required property '" + property_name + "'"),
          name(property_name) {}

    std::string name;
};

class UnexpectedEof : public InputError {
public:
    using InputError::InputError;
};

class UnsupportedFormat : public InputError {
public:
    using InputError::InputError;
};

class CorruptContainer : public InputError {
public:
    using InputError::InputError;
};

class DimensionMismatch : public InputError {
public:
    using InputError::InputError;
};

class InvalidSpec : public InputError {
public:
    using InputError::InputError;
};

class InvalidParams : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptyViews : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptyClip : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptyObservations : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptyCluster : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class NoClusters : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class NoQualifyingGaussians : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptyFrames : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class TooFewFrames : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class NotVisible : public PipelineError {
public:
    using PipelineError::PipelineError;
};

class EmptySegmentation : public PipelineError {
public:
    using PipelineError::PipelineError;
};

}  // namespace avs3d
