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

#include "physi/allocation.hpp"
#include "physi/errors.hpp"

#include <algorithm>
#include <sstream>

namespace physi {

const char* to_string(AssignmentRule rule)
{
    switch (rule) {
    case AssignmentRule::UnauthorizedPrivate: return "unauthorized-private";
    case AssignmentRule::AuthorizedPrivate: return "authorized-private";
    case AssignmentRule::WeakCommon: return "weak-common";
    case AssignmentRule::Free: return "free";
    }
    return "unknown";
}

SchemeSet enumerate_schemes(const GsvdFactors& f, const SubchannelPartition& part)
{
    SchemeSet set;
    set.rules.assign(f.q, AssignmentRule::Free);

    for (auto i : part.pc2) set.rules.at(i) = AssignmentRule::UnauthorizedPrivate;
    for (auto i : part.pc1) set.rules.at(i) = AssignmentRule::AuthorizedPrivate;
    for (auto i : part.cc) {
        const auto idx = static_cast<Eigen::Index>(i);
        if (f.c_sq(idx) > f.d_sq(idx) + kGainTieTolerance)
            set.free_indices.push_back(i);
        else
            set.rules.at(i) = AssignmentRule::WeakCommon;
    }
    std::sort(set.free_indices.begin(), set.free_indices.end());

    const std::size_t free_count = set.free_indices.size();
    if (free_count >= 8 * sizeof(std::size_t) - 1)
        throw DimensionTooLarge("enumerate_schemes: too many free common channels");
    const std::size_t total = std::size_t{1} << free_count;

    for (std::size_t mask = 0; mask < total; ++mask) {
        std::vector<int> conf(f.q, 0);
        for (std::size_t b = 0; b < free_count; ++b)
            if (mask & (std::size_t{1} << b)) conf[set.free_indices[b]] = 1;

        MessageAllocation alloc;
        for (std::size_t i = 0; i < f.q; ++i) {
            switch (set.rules[i]) {
            case AssignmentRule::UnauthorizedPrivate: alloc.discarded.push_back(i); break;
            case AssignmentRule::AuthorizedPrivate: alloc.gammac.push_back(i); break;
            case AssignmentRule::WeakCommon: alloc.gamma0.push_back(i); break;
            case AssignmentRule::Free:
                (conf[i] ? alloc.gammac : alloc.gamma0).push_back(i);
                break;
            }
        }
        set.schemes.push_back(std::move(alloc));
        set.ids.push_back(mask);
    }
    return set;
}

SchemeSet remove_scheme(const SchemeSet& set, std::size_t k)
{
    if (k >= set.schemes.size()) {
        std::ostringstream msg;
        msg << "remove_scheme: index " << k << " out of range for " << set.schemes.size()
            << " schemes";
        throw IndexOutOfRange(msg.str());
    }
    SchemeSet out = set;
    out.schemes.erase(out.schemes.begin() + static_cast<std::ptrdiff_t>(k));
    out.ids.erase(out.ids.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

} // namespace physi
