// Copyright 2026 The dqlimb Authors
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

#include <stdexcept>
#include <string>

namespace dqlimb {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed documents, out-of-range parameters, invalid
/// states. The CLI maps these to exit status 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Failure of a numerical procedure on otherwise valid input. The CLI maps
/// these to exit status 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define DQLIMB_DEFINE_ERROR(Name, Base) \
  class Name : public Base {            \
   public:                              \
    using Base::Base;                   \
  }

DQLIMB_DEFINE_ERROR(NonFiniteValue, InputError);
DQLIMB_DEFINE_ERROR(NonUnitQuaternion, InputError);
DQLIMB_DEFINE_ERROR(NonUnitAxis, InputError);
DQLIMB_DEFINE_ERROR(NonUnitDualQuaternion, InputError);
DQLIMB_DEFINE_ERROR(NonUnitPose, InputError);
DQLIMB_DEFINE_ERROR(ParseError, InputError);
DQLIMB_DEFINE_ERROR(ValidationError, InputError);
DQLIMB_DEFINE_ERROR(RomViolation, InputError);
DQLIMB_DEFINE_ERROR(InvalidDuration, InputError);
DQLIMB_DEFINE_ERROR(InvalidSampleCount, InputError);
DQLIMB_DEFINE_ERROR(TooFewSamples, InputError);
DQLIMB_DEFINE_ERROR(EmptyDataset, InputError);
DQLIMB_DEFINE_ERROR(FrameMismatch, InputError);
DQLIMB_DEFINE_ERROR(MissingArtifacts, InputError);
DQLIMB_DEFINE_ERROR(SamplingExhausted, NumericalError);
DQLIMB_DEFINE_ERROR(DivergedTraining, NumericalError);

#undef DQLIMB_DEFINE_ERROR

}  // namespace dqlimb
