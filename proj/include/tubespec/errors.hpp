// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <stdexcept>
#include <string>

namespace tubespec {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define TUBESPEC_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  };

TUBESPEC_DEFINE_ERROR(DegenerateLattice)
TUBESPEC_DEFINE_ERROR(BoundTooLarge)
TUBESPEC_DEFINE_ERROR(NotCoprime)
TUBESPEC_DEFINE_ERROR(NonPositiveRadius)
TUBESPEC_DEFINE_ERROR(ZeroMode)
TUBESPEC_DEFINE_ERROR(NoConvergence)
TUBESPEC_DEFINE_ERROR(BadConfig)
TUBESPEC_DEFINE_ERROR(ZeroFunction)
TUBESPEC_DEFINE_ERROR(WindowNotCovered)
TUBESPEC_DEFINE_ERROR(NotNormalized)
TUBESPEC_DEFINE_ERROR(TubeTooShort)
TUBESPEC_DEFINE_ERROR(InvalidArgument)
TUBESPEC_DEFINE_ERROR(GridTooCoarse)
TUBESPEC_DEFINE_ERROR(IterationFailure)
TUBESPEC_DEFINE_ERROR(NotQuasiIsometric)
TUBESPEC_DEFINE_ERROR(BadFamily)

#undef TUBESPEC_DEFINE_ERROR

}  // namespace tubespec
