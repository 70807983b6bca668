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

#include "physi/channel_io.hpp"
#include "physi/errors.hpp"
#include "physi/random.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace physi {

namespace {

using Eigen::Index;

// Whitespace-separated tokens with comment lines stripped, tracking line numbers
// for error messages.
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string next(const char* what)
    {
        while (pos_ >= tokens_.size()) {
            std::string line;
            if (!std::getline(in_, line)) {
                std::ostringstream msg;
                msg << "channel file: unexpected end of input while reading " << what
                    << " (after line " << line_ << ")";
                throw ConfigError(msg.str());
            }
            ++line_;
            tokens_.clear();
            pos_ = 0;
            if (!line.empty() && line[0] == '#') continue;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens_.push_back(tok);
        }
        return tokens_[pos_++];
    }

    template <typename T>
    T number(const char* what)
    {
        const std::string tok = next(what);
        T value{};
        const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || end != tok.data() + tok.size()) {
            std::ostringstream msg;
            msg << "channel file line " << line_ << ": cannot parse " << what << " from '" << tok
                << "'";
            throw ConfigError(msg.str());
        }
        return value;
    }

    bool only_whitespace_left()
    {
        if (pos_ < tokens_.size()) return false;
        std::string line;
        while (std::getline(in_, line)) {
            if (!line.empty() && line[0] == '#') continue;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return false;
        }
        return true;
    }

private:
    std::istream& in_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

void write_matrix(std::ostream& out, const CMatrix& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << "  ";
            out << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag());
        }
        out << '\n';
    }
}

CMatrix read_matrix(TokenReader& reader, Index rows, Index cols)
{
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double re = reader.number<double>("real part");
            const double im = reader.number<double>("imaginary part");
            m(i, j) = {re, im};
        }
    return m;
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

ChannelPair generate_channels(std::size_t nt, std::size_t nb, std::size_t ne, std::uint64_t seed)
{
    if (nt == 0 || nb == 0 || ne == 0)
        throw DimensionMismatch("generate_channels: antenna counts must be >= 1");
    CounterRng rng(seed);
    CMatrix h1(static_cast<Index>(nb), static_cast<Index>(nt));
    CMatrix h2(static_cast<Index>(ne), static_cast<Index>(nt));
    for (Index i = 0; i < h1.rows(); ++i)
        for (Index j = 0; j < h1.cols(); ++j) h1(i, j) = rng.complex_normal();
    for (Index i = 0; i < h2.rows(); ++i)
        for (Index j = 0; j < h2.cols(); ++j) h2(i, j) = rng.complex_normal();
    return ChannelPair(std::move(h1), std::move(h2));
}

void write_channel_pair(std::ostream& out, const ChannelPair& pair)
{
    out << pair.nt() << ' ' << pair.nb() << ' ' << pair.ne() << '\n';
    write_matrix(out, pair.h1());
    write_matrix(out, pair.h2());
}

ChannelPair read_channel_pair(std::istream& in)
{
    TokenReader reader(in);
    const auto nt = reader.number<long long>("nt");
    const auto nb = reader.number<long long>("nb");
    const auto ne = reader.number<long long>("ne");
    if (nt < 1 || nb < 1 || ne < 1) throw ConfigError("channel file: antenna counts must be >= 1");
    CMatrix h1 = read_matrix(reader, nb, nt);
    CMatrix h2 = read_matrix(reader, ne, nt);
    if (!reader.only_whitespace_left()) throw ConfigError("channel file: trailing data after H2");
    return ChannelPair(std::move(h1), std::move(h2));
}

void save_channel_pair(const std::string& path, const ChannelPair& pair)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_channel_pair(out, pair);
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

ChannelPair load_channel_pair(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open channel file '" + path + "'");
    return read_channel_pair(in);
}

} // namespace physi
