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

#include "physi/rates.hpp"
#include "physi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace physi {

namespace {

using Complex = std::complex<double>;
using Index = Eigen::Index;

void require_length(const RVector& v, std::size_t n, const char* what)
{
    if (static_cast<std::size_t>(v.size()) != n) {
        std::ostringstream msg;
        msg << what << ": power vector has length " << v.size() << ", expected " << n;
        throw DimensionMismatch(msg.str());
    }
}

void require_indices(const GsvdFactors& f, const IndexList& idx, const char* what)
{
    for (auto i : idx)
        if (i >= f.q) {
            std::ostringstream msg;
            msg << what << ": subchannel index " << i << " out of range for q = " << f.q;
            throw DimensionMismatch(msg.str());
        }
}

// log2 |det(M)| through an LU factorization, immune to overflow.
double log2_abs_det(const CMatrix& m)
{
    Eigen::PartialPivLU<CMatrix> lu(m);
    const CMatrix& packed = lu.matrixLU();
    double acc = 0.0;
    for (Index i = 0; i < packed.rows(); ++i) acc += std::log2(std::abs(packed(i, i)));
    return acc;
}

void require_psd(const CMatrix& q, Index nt, const char* name)
{
    if (q.rows() != nt || q.cols() != nt) {
        std::ostringstream msg;
        msg << "covariance_rates: " << name << " is " << q.rows() << "x" << q.cols() << ", expected "
            << nt << "x" << nt;
        throw DimensionMismatch(msg.str());
    }
    const double scale = std::max(q.cwiseAbs().maxCoeff(), 1.0);
    if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NotPSD(std::string("covariance_rates: ") + name + " is not Hermitian");
    const CMatrix herm = 0.5 * (q + q.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
    const double trace = herm.trace().real();
    const double floor = -1e-10 * std::max(trace, 0.0) / static_cast<double>(nt);
    if (eig.eigenvalues().minCoeff() < floor)
        throw NotPSD(std::string("covariance_rates: ") + name + " has a negative eigenvalue");
}

} // namespace

void MessageAllocation::validate(std::size_t q) const
{
    std::vector<int> seen(q, 0);
    for (const IndexList* list : {&gamma0, &gammac, &discarded})
        for (auto i : *list) {
            if (i >= q) throw DimensionMismatch("MessageAllocation: index out of range");
            ++seen[i];
        }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
        throw DimensionMismatch("MessageAllocation: sets must partition {0, ..., q-1}");
}

double secrecy_rate(const GsvdFactors& f, const MessageAllocation& alloc, const RVector& pc)
{
    require_length(pc, alloc.n(), "secrecy_rate");
    require_indices(f, alloc.gammac, "secrecy_rate");
    double rate = 0.0;
    for (std::size_t n = 0; n < alloc.n(); ++n) {
        const auto j = static_cast<Index>(alloc.gammac[n]);
        const double p = pc(static_cast<Index>(n));
        rate += std::log2(1.0 + p * f.c_sq(j)) - std::log2(1.0 + p * f.d_sq(j));
    }
    return rate;
}

std::pair<double, double> multicast_rates(const GsvdFactors& f, const MessageAllocation& alloc,
                                          const RVector& p0)
{
    require_length(p0, alloc.m(), "multicast_rates");
    require_indices(f, alloc.gamma0, "multicast_rates");
    double r1 = 0.0;
    double r2 = 0.0;
    for (std::size_t m = 0; m < alloc.m(); ++m) {
        const auto i = static_cast<Index>(alloc.gamma0[m]);
        const double p = p0(static_cast<Index>(m));
        r1 += std::log2(1.0 + p * f.c_sq(i));
        r2 += std::log2(1.0 + p * f.d_sq(i));
    }
    return {r1, r2};
}

double total_power(const GsvdFactors& f, const MessageAllocation& alloc, const RVector& p0,
                   const RVector& pc)
{
    require_length(p0, alloc.m(), "total_power");
    require_length(pc, alloc.n(), "total_power");
    require_indices(f, alloc.gamma0, "total_power");
    require_indices(f, alloc.gammac, "total_power");
    double power = 0.0;
    for (std::size_t m = 0; m < alloc.m(); ++m)
        power += f.a_col_norm_sq(static_cast<Index>(alloc.gamma0[m])) * p0(static_cast<Index>(m));
    for (std::size_t n = 0; n < alloc.n(); ++n)
        power += f.a_col_norm_sq(static_cast<Index>(alloc.gammac[n])) * pc(static_cast<Index>(n));
    return power;
}

void evaluate(const GsvdFactors& f, const MessageAllocation& alloc, PowerSolution& sol)
{
    sol.secrecy_rate = secrecy_rate(f, alloc, sol.pc);
    std::tie(sol.multicast_rate_1, sol.multicast_rate_2) = multicast_rates(f, alloc, sol.p0);
    sol.total_power = total_power(f, alloc, sol.p0, sol.pc);
}

CovarianceRates covariance_rates(const ChannelPair& pair, const CMatrix& q0, const CMatrix& qc)
{
    const auto nt = static_cast<Index>(pair.nt());
    require_psd(q0, nt, "Q0");
    require_psd(qc, nt, "Qc");

    CovarianceRates out;
    double r0 = 0.0;
    double log_det_conf[2] = {0.0, 0.0};
    int k = 0;
    for (const CMatrix* h : {&pair.h1(), &pair.h2()}) {
        const Index rows = h->rows();
        const CMatrix id = CMatrix::Identity(rows, rows);
        const CMatrix interference = id + (*h) * qc * h->adjoint();
        const CMatrix signal = (*h) * q0 * h->adjoint();
        const CMatrix sinr = id + interference.partialPivLu().solve(signal);
        const double rate = log2_abs_det(sinr);
        r0 = k == 0 ? rate : std::min(r0, rate);
        log_det_conf[k] = log2_abs_det(interference);
        ++k;
    }
    out.r0_bound = r0;
    out.rc = log_det_conf[0] - log_det_conf[1];
    return out;
}

CMatrix subchannel_covariance(const GsvdFactors& f, const IndexList& idx, const RVector& p)
{
    require_length(p, idx.size(), "subchannel_covariance");
    require_indices(f, idx, "subchannel_covariance");
    const Index nt = f.a.rows();
    CMatrix cov = CMatrix::Zero(nt, nt);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto col = f.a.col(static_cast<Index>(idx[k]));
        cov.noalias() += p(static_cast<Index>(k)) * col * col.adjoint();
    }
    return cov;
}

double clean_rate(double rate)
{
    return std::abs(rate) < 1e-12 ? 0.0 : rate;
}

} // namespace physi
