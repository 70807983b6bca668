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

#ifndef PHYSI_ALLOCATION_HPP
#define PHYSI_ALLOCATION_HPP

#include "physi/gsvd.hpp"
#include "physi/rates.hpp"

#include <cstdint>
#include <vector>

namespace physi {

/// Why a subchannel ended up where it is in a scheme.
enum class AssignmentRule : std::uint8_t {
    UnauthorizedPrivate, // private channel of receiver 2: discarded
    AuthorizedPrivate,   // private channel of receiver 1: confidential only
    WeakCommon,          // common channel with c^2 <= d^2: multicast only
    Free                 // common channel with c^2 > d^2: enumerated
};

const char* to_string(AssignmentRule rule);

/// Candidate subchannel allocations. `ids[k]` is the position of `schemes[k]` in
/// the original enumeration and survives removals; `rules[i]` is shared by all
/// schemes and records the rule that placed subchannel i.
struct SchemeSet {
    std::vector<MessageAllocation> schemes;
    std::vector<std::size_t> ids;
    std::vector<AssignmentRule> rules;
    IndexList free_indices;

    std::size_t size() const { return schemes.size(); }
    bool empty() const { return schemes.empty(); }
};

/// All allocations that respect the pruning rules. The free common channels
/// are enumerated as a binary counter: bit b of scheme k set means
/// free_indices[b] carries the confidential message. Scheme 0 sends every free
/// channel to the multicast set; scheme 2^F - 1 sends all of them to the
/// confidential set.
SchemeSet enumerate_schemes(const GsvdFactors& f, const SubchannelPartition& part);

/// Copy of `set` without entry k. Throws IndexOutOfRange.
SchemeSet remove_scheme(const SchemeSet& set, std::size_t k);

} // namespace physi

#endif
