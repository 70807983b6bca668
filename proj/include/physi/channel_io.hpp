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

#ifndef PHYSI_CHANNEL_IO_HPP
#define PHYSI_CHANNEL_IO_HPP

#include "physi/gsvd.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace physi {

/// i.i.d. CN(0, 1) channel pair drawn from CounterRng(seed): H1 row-major first,
/// then H2, one complex_normal() per entry.
ChannelPair generate_channels(std::size_t nt, std::size_t nb, std::size_t ne, std::uint64_t seed);

/// Plain-text matrix format:
///
///     nt nb ne
///     <nb rows of H1, each with nt "re im" pairs>
///     <ne rows of H2, each with nt "re im" pairs>
///
/// Numbers are written in shortest round-trip form, so write + read is exact.
/// Lines starting with '#' are comments.
void write_channel_pair(std::ostream& out, const ChannelPair& pair);
ChannelPair read_channel_pair(std::istream& in);

void save_channel_pair(const std::string& path, const ChannelPair& pair);
ChannelPair load_channel_pair(const std::string& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

} // namespace physi

#endif
