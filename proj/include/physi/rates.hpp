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

#ifndef PHYSI_RATES_HPP
#define PHYSI_RATES_HPP

#include "physi/gsvd.hpp"

#include <utility>

namespace physi {

/// Assignment of GSVD subchannels to the two messages. Index lists are ascending
/// and together cover {0, ..., q-1} exactly once.
struct MessageAllocation {
    IndexList gamma0;    // multicast subchannels
    IndexList gammac;    // confidential subchannels
    IndexList discarded; // carry no message

    std::size_t m() const { return gamma0.size(); }
    std::size_t n() const { return gammac.size(); }

    /// Throws DimensionMismatch unless the three lists partition {0, ..., q-1}.
    void validate(std::size_t q) const;

    bool operator==(const MessageAllocation&) const = default;
};

/// Per-subchannel powers and the rates they achieve (bits per channel use).
struct PowerSolution {
    RVector p0; // multicast powers, one per gamma0 entry
    RVector pc; // confidential powers, one per gammac entry
    double secrecy_rate = 0.0;
    double multicast_rate_1 = 0.0;
    double multicast_rate_2 = 0.0;
    double total_power = 0.0;
};

/// sum_n log2(1 + pc_n c^2_{j_n}) - log2(1 + pc_n d^2_{j_n}) over the confidential set.
double secrecy_rate(const GsvdFactors& f, const MessageAllocation& alloc, const RVector& pc);

/// (R_{0,1}, R_{0,2}): multicast rate seen by receiver 1 and receiver 2.
std::pair<double, double> multicast_rates(const GsvdFactors& f, const MessageAllocation& alloc,
                                          const RVector& p0);

/// Transmit power sum_m a_{0,m} p_{0,m} + sum_n a_{c,n} p_{c,n}, where a are the
/// squared column norms of A on the respective index sets.
double total_power(const GsvdFactors& f, const MessageAllocation& alloc, const RVector& p0,
                   const RVector& pc);

/// Fills rates and total power of `sol` from its power vectors.
void evaluate(const GsvdFactors& f, const MessageAllocation& alloc, PowerSolution& sol);

/// Rates of a covariance pair evaluated from the log-det expressions.
struct CovarianceRates {
    double r0_bound = 0.0; // min over receivers of the multicast log-det rate
    double rc = 0.0;       // log det(I + H1 Qc H1^H) - log det(I + H2 Qc H2^H)
};

/// Throws NotPSD when q0 or qc is not Hermitian positive semidefinite (min
/// eigenvalue below -1e-10 * trace / Nt) and DimensionMismatch on shape errors.
CovarianceRates covariance_rates(const ChannelPair& pair, const CMatrix& q0, const CMatrix& qc);

/// Covariance A E diag(p) E^H A^H of a message sent on the subchannels `idx`.
CMatrix subchannel_covariance(const GsvdFactors& f, const IndexList& idx, const RVector& p);

/// Zero for |rate| below 1e-12, the rate itself otherwise.
double clean_rate(double rate);

} // namespace physi

#endif
