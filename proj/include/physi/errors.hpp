// SPDX-License-Identifier: Apache-2.0
//
// physi - GSVD precoding for MIMO broadcast channels with integrated services
// Copyright (C) 2026 The physi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PHYSI_ERRORS_HPP
#define PHYSI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace physi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Stacked channel matrix [H1; H2] has numerical rank below min(Nt, Nb + Ne).
class RankDeficient : public Error {
public:
    using Error::Error;
};

class NotPSD : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// Raised by the brute-force oracles when the search space would be too large.
class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

/// Newton iterations did not converge within the configured limits.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

/// The channel pair cannot carry both services with GSVD precoding.
class PhySiInfeasible : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace physi

#endif
