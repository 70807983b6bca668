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

#include "physi/gsvd.hpp"
#include "physi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace physi {

namespace {

using Complex = std::complex<double>;
using Index = Eigen::Index;

// Column norms below this are numerical zeros of an orthonormal factor block.
constexpr double kNullColumn = 64.0 * std::numeric_limits<double>::epsilon();

// Unit-modulus factor that rotates the largest-magnitude entry of `col` onto
// the nonnegative real axis. The first maximum wins on ties.
Complex phase_fix(const Eigen::Ref<const Eigen::VectorXcd>& col)
{
    Index k = 0;
    col.cwiseAbs().maxCoeff(&k);
    const double mag = std::abs(col(k));
    if (mag == 0.0) return Complex(1.0, 0.0);
    return std::conj(col(k)) / mag;
}

// Orthonormal completion of the (already orthonormal) columns of `basis`
// inside C^m. Returns m - k columns.
CMatrix orthonormal_complement(const CMatrix& basis, Index m)
{
    const Index k = basis.cols();
    if (k == 0) return CMatrix::Identity(m, m);
    if (k >= m) return CMatrix(m, 0);
    Eigen::HouseholderQR<CMatrix> qr(basis);
    CMatrix full = qr.householderQ() * CMatrix::Identity(m, m);
    return full.rightCols(m - k);
}

void modified_gram_schmidt(CMatrix& cols)
{
    // Two passes recover orthogonality lost to cancellation.
    for (int pass = 0; pass < 2; ++pass) {
        for (Index j = 0; j < cols.cols(); ++j) {
            for (Index k = 0; k < j; ++k) {
                const Complex proj = cols.col(k).dot(cols.col(j));
                cols.col(j) -= proj * cols.col(k);
            }
            cols.col(j).normalize();
        }
    }
}

bool all_finite(const CMatrix& m)
{
    return m.real().allFinite() && m.imag().allFinite();
}

} // namespace

ChannelPair::ChannelPair(CMatrix h1, CMatrix h2) : h1_(std::move(h1)), h2_(std::move(h2))
{
    if (h1_.rows() == 0 || h1_.cols() == 0 || h2_.rows() == 0 || h2_.cols() == 0)
        throw DimensionMismatch("ChannelPair: channel matrices must be non-empty");
    if (h1_.cols() != h2_.cols()) {
        std::ostringstream msg;
        msg << "ChannelPair: H1 has " << h1_.cols() << " columns but H2 has " << h2_.cols();
        throw DimensionMismatch(msg.str());
    }
    if (!all_finite(h1_) || !all_finite(h2_))
        throw std::invalid_argument("ChannelPair: channel entries must be finite");
}

bool ChannelPair::operator==(const ChannelPair& other) const
{
    return h1_.rows() == other.h1_.rows() && h1_.cols() == other.h1_.cols() &&
           h2_.rows() == other.h2_.rows() && h2_.cols() == other.h2_.cols() && h1_ == other.h1_ &&
           h2_ == other.h2_;
}

RMatrix GsvdFactors::c_matrix() const
{
    const Index nb = psi_r.rows();
    const Index qi = static_cast<Index>(q);
    const Index offset = std::max<Index>(0, qi - nb);
    RMatrix c = RMatrix::Zero(nb, qi);
    for (Index i = offset; i < qi; ++i) c(i - offset, i) = c_diag(i);
    return c;
}

RMatrix GsvdFactors::d_matrix() const
{
    const Index ne = psi_e.rows();
    const Index qi = static_cast<Index>(q);
    RMatrix d = RMatrix::Zero(ne, qi);
    for (Index i = 0; i < std::min(ne, qi); ++i) d(i, i) = d_diag(i);
    return d;
}

GsvdFactors gsvd(const ChannelPair& pair, const GsvdOptions& options)
{
    const CMatrix& h1 = pair.h1();
    const CMatrix& h2 = pair.h2();
    if (h1.cols() != h2.cols()) throw DimensionMismatch("gsvd: H1 and H2 column counts differ");

    const Index nt = h1.cols();
    const Index nb = h1.rows();
    const Index ne = h2.rows();
    const Index m = nb + ne;
    const Index q = std::min(nt, m);

    CMatrix stacked(m, nt);
    stacked << h1, h2;

    {
        Eigen::JacobiSVD<CMatrix> sv(stacked);
        const auto& s = sv.singularValues();
        const double smax = s.size() > 0 ? s(0) : 0.0;
        Index rank = 0;
        for (Index i = 0; i < s.size(); ++i)
            if (smax > 0.0 && s(i) > options.rank_tolerance * smax) ++rank;
        if (rank < q) {
            std::ostringstream msg;
            msg << "gsvd: stacked channel has numerical rank " << rank << " < q = " << q;
            throw RankDeficient(msg.str());
        }
    }

    // Restrict a wide pair to the row space of [H1; H2]; A is mapped back by `basis`.
    CMatrix basis;
    CMatrix reduced;
    if (nt > m) {
        Eigen::HouseholderQR<CMatrix> row_qr(stacked.adjoint());
        basis = row_qr.householderQ() * CMatrix::Identity(nt, m);
        reduced = stacked * basis;
    } else {
        reduced = stacked;
    }

    Eigen::HouseholderQR<CMatrix> qr(reduced);
    const CMatrix q_thin = qr.householderQ() * CMatrix::Identity(reduced.rows(), q);
    const CMatrix r_tri = qr.matrixQR().topRows(q).template triangularView<Eigen::Upper>();
    const CMatrix q1 = q_thin.topRows(nb);
    const CMatrix q2 = q_thin.bottomRows(ne);

    Eigen::JacobiSVD<CMatrix> svd1(q1, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector sigma = svd1.singularValues();
    const Index k1 = sigma.size(); // min(nb, q)
    CMatrix u1 = svd1.matrixU();
    const CMatrix& v1 = svd1.matrixV();

    auto sigma_of = [&](Index j) { return j < k1 ? sigma(j) : 0.0; };

    std::vector<Index> perm(static_cast<std::size_t>(q));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](Index a, Index b) { return sigma_of(a) < sigma_of(b); });

    GsvdFactors f;
    f.q = static_cast<std::size_t>(q);
    f.c_diag = RVector::Zero(q);
    f.d_diag = RVector::Zero(q);

    CMatrix z(q, q);
    for (Index i = 0; i < q; ++i) {
        z.col(i) = v1.col(perm[i]);
        f.c_diag(i) = std::min(1.0, sigma_of(perm[i]));
    }

    // Psi_r: U columns of nonzero singular values go to row (i - offset); the
    // remaining U columns fill the free slots in order.
    const Index offset = std::max<Index>(0, q - nb);
    f.psi_r = CMatrix::Zero(nb, nb);
    std::vector<bool> r_used(static_cast<std::size_t>(nb), false);
    std::vector<bool> u_used(static_cast<std::size_t>(k1), false);
    for (Index i = offset; i < q; ++i) {
        const Index j = perm[i];
        if (j >= k1) continue;
        Complex ph = Complex(1.0, 0.0);
        if (f.c_diag(i) > 0.0) ph = phase_fix(u1.col(j));
        f.psi_r.col(i - offset) = ph * u1.col(j);
        z.col(i) *= ph;
        r_used[static_cast<std::size_t>(i - offset)] = true;
        u_used[static_cast<std::size_t>(j)] = true;
    }
    {
        Index next = 0;
        for (Index col = 0; col < nb; ++col) {
            if (r_used[static_cast<std::size_t>(col)]) continue;
            while (next < nb && next < k1 && u_used[static_cast<std::size_t>(next)]) ++next;
            f.psi_r.col(col) = u1.col(next);
            f.psi_r.col(col) *= phase_fix(f.psi_r.col(col));
            ++next;
        }
    }

    // Lower block rotated by Z has mutually orthogonal columns of norm d_i.
    CMatrix w = q2 * z;
    const Index kd = std::min(ne, q);
    std::vector<Index> d_slots;
    for (Index i = 0; i < kd; ++i) {
        const double norm = w.col(i).norm();
        if (norm > kNullColumn) {
            f.d_diag(i) = std::min(1.0, norm);
            d_slots.push_back(i);
        }
    }

    // c_i = 0 forces d_i = 1; the envelope removes round-off inversions among ties.
    for (const Index i : d_slots)
        if (f.c_diag(i) == 0.0) f.d_diag(i) = 1.0;
    for (Index i = 1; i < q; ++i) f.d_diag(i) = std::min(f.d_diag(i), f.d_diag(i - 1));

    CMatrix assigned(ne, static_cast<Index>(d_slots.size()));
    for (std::size_t k = 0; k < d_slots.size(); ++k) {
        const Index i = d_slots[k];
        assigned.col(static_cast<Index>(k)) = w.col(i) / w.col(i).norm();
    }
    modified_gram_schmidt(assigned);

    // Subchannels that are invisible to receiver 1 take their phase from Psi_e.
    for (std::size_t k = 0; k < d_slots.size(); ++k) {
        const Index i = d_slots[k];
        if (f.c_diag(i) > 0.0) continue;
        const Complex ph = phase_fix(assigned.col(static_cast<Index>(k)));
        assigned.col(static_cast<Index>(k)) *= ph;
        z.col(i) *= ph;
    }

    f.psi_e = CMatrix::Zero(ne, ne);
    std::vector<bool> e_used(static_cast<std::size_t>(ne), false);
    for (std::size_t k = 0; k < d_slots.size(); ++k) {
        f.psi_e.col(d_slots[k]) = assigned.col(static_cast<Index>(k));
        e_used[static_cast<std::size_t>(d_slots[k])] = true;
    }
    const CMatrix complement = orthonormal_complement(assigned, ne);
    {
        Index next = 0;
        for (Index col = 0; col < ne; ++col) {
            if (e_used[static_cast<std::size_t>(col)]) continue;
            f.psi_e.col(col) = complement.col(next++);
            f.psi_e.col(col) *= phase_fix(f.psi_e.col(col));
        }
    }

    // A = basis * R^{-1} * Z.
    CMatrix a = r_tri.template triangularView<Eigen::Upper>().solve(z);
    f.a = nt > m ? CMatrix(basis * a) : a;

    f.c_sq = f.c_diag.array().square();
    f.d_sq = f.d_diag.array().square();
    f.a_col_norm_sq = f.a.colwise().squaredNorm().transpose();
    return f;
}

GsvdResiduals reconstruction_residuals(const ChannelPair& pair, const GsvdFactors& f)
{
    GsvdResiduals r;
    const CMatrix c = f.c_matrix().cast<Complex>();
    const CMatrix d = f.d_matrix().cast<Complex>();
    r.h1 = (pair.h1() * f.a - f.psi_r * c).norm() / pair.h1().norm();
    r.h2 = (pair.h2() * f.a - f.psi_e * d).norm() / pair.h2().norm();
    return r;
}

SubchannelPartition classify_subchannels(const GsvdFactors& f, double tolerance)
{
    if (!(tolerance > 0.0 && tolerance < 0.5))
        throw std::invalid_argument("classify_subchannels: tolerance must lie in (0, 0.5)");
    SubchannelPartition part;
    part.tolerance = tolerance;
    for (std::size_t i = 0; i < f.q; ++i) {
        const auto idx = static_cast<Index>(i);
        if (f.c_sq(idx) >= 1.0 - tolerance)
            part.pc1.push_back(i);
        else if (f.d_sq(idx) >= 1.0 - tolerance)
            part.pc2.push_back(i);
        else
            part.cc.push_back(i);
    }
    return part;
}

FeasibilityReport check_feasibility(const GsvdFactors& f, const SubchannelPartition& part)
{
    FeasibilityReport report;
    report.multicast_infeasible = part.cc.empty();
    report.confidential_infeasible = true;
    for (Index i = 0; i < static_cast<Index>(f.q); ++i) {
        if (f.c_sq(i) > f.d_sq(i) + kGainTieTolerance) {
            report.confidential_infeasible = false;
            break;
        }
    }
    return report;
}

std::string FeasibilityReport::describe() const
{
    if (phy_si_feasible()) return "feasible";
    std::string out;
    if (multicast_infeasible) out += "no common subchannel, multicast message cannot be carried";
    if (confidential_infeasible) {
        if (!out.empty()) out += "; ";
        out += "c_i <= d_i on every subchannel, secrecy rate is always zero";
    }
    return out;
}

SubchannelCounts expected_subchannel_counts(std::size_t nt, std::size_t nb, std::size_t ne)
{
    const std::size_t q = std::min(nt, nb + ne);
    const std::size_t rank1 = std::min(nb, nt);
    const std::size_t rank2 = std::min(ne, nt);

    SubchannelCounts counts;
    counts.pc1 = q - rank2;
    counts.pc2 = q - rank1;
    counts.cc = rank1 + rank2 - q;

    if (nt < nb && ne <= nt) counts.configurations.emplace_back("C1");
    if (nt >= nb && ne > nt) counts.configurations.emplace_back("C2");
    if (nt <= nb && ne >= nt) counts.configurations.emplace_back("C3");
    if (nb < nt && ne < nt && nb + ne > nt) counts.configurations.emplace_back("C4");
    if (nb + ne <= nt) counts.configurations.emplace_back("C5");
    return counts;
}

} // namespace physi
