// Copyright 2026 The SARA Authors. All Rights Reserved.
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

#include "sara/format.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sara {

namespace {

constexpr char kMagic[4] = {'S', 'A', 'R', 'A'};

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t GetU32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
         (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

// Throws instead of wrapping; a hostile header must not yield a small count.
std::size_t ElementCount(const std::vector<std::uint32_t>& dims) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max() / 4;
  std::size_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > kMax / d) {
      throw Error(ErrorCode::kInvalidArgument, "tensor element count overflows");
    }
    n *= d;
  }
  return n;
}

// Data is read in bounded chunks so a header claiming billions of elements
// fails as truncated instead of allocating up front.
constexpr std::size_t kChunkElements = std::size_t{1} << 18;

// Reads exactly n bytes or throws kTruncatedStream.
void ReadExact(std::istream& in, std::uint8_t* dst, std::size_t n,
               const char* section) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::kTruncatedStream,
                std::string("stream ended inside ") + section);
  }
}

}  // namespace

std::vector<std::uint8_t> EncodeTensor(const RawTensor& t) {
  if (t.dims.empty() || t.dims.size() > 255) {
    throw Error(ErrorCode::kInvalidArgument, "tensor needs 1..255 dims");
  }
  for (auto d : t.dims) {
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "zero-sized dim");
  }
  if (ElementCount(t.dims) != t.data.size()) {
    throw Error(ErrorCode::kLengthMismatch, "data length does not match dims");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * t.dims.size() + 4 * t.data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kFormatVersion);
  out.push_back(kDtypeReal32);
  out.push_back(static_cast<std::uint8_t>(t.dims.size()));
  out.push_back(0);
  for (auto d : t.dims) PutU32(out, d);
  for (float v : t.data) PutU32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

std::size_t WriteTensor(const RawTensor& t, std::ostream& sink) {
  const auto bytes = EncodeTensor(t);
  sink.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorCode::kIoError, "tensor sink write failed");
  return bytes.size();
}

RawTensor ReadTensor(std::istream& in) {
  std::uint8_t header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got < 4 || std::memcmp(header, kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing SARA magic");
  }
  if (got < kHeaderBytes) {
    throw Error(ErrorCode::kTruncatedStream, "stream ended inside header");
  }
  if (header[4] != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported SARA version " + std::to_string(header[4]));
  }
  if (header[5] != kDtypeReal32) {
    throw Error(ErrorCode::kInvalidArgument,
                "unsupported dtype " + std::to_string(header[5]));
  }
  const std::size_t ndim = header[6];
  if (ndim == 0) throw Error(ErrorCode::kInvalidArgument, "ndim is zero");

  RawTensor t;
  std::vector<std::uint8_t> buf(4 * ndim);
  ReadExact(in, buf.data(), buf.size(), "dims");
  for (std::size_t i = 0; i < ndim; ++i) {
    const auto d = GetU32(&buf[4 * i]);
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "zero-sized dim");
    t.dims.push_back(d);
  }
  const std::size_t n = ElementCount(t.dims);
  t.data.reserve(std::min(n, kChunkElements));
  for (std::size_t done = 0; done < n;) {
    const std::size_t m = std::min(kChunkElements, n - done);
    buf.resize(4 * m);
    ReadExact(in, buf.data(), buf.size(), "data");
    for (std::size_t i = 0; i < m; ++i) {
      t.data.push_back(std::bit_cast<float>(GetU32(&buf[4 * i])));
    }
    done += m;
  }
  return t;
}

RawTensor DecodeTensor(std::span<const std::uint8_t> bytes) {
  std::istringstream in(
      std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  return ReadTensor(in);
}

RawTensor ReadTensorFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return ReadTensor(in);
}

std::size_t WriteTensorFile(const RawTensor& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path);
  const auto n = WriteTensor(t, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write to " + path + " failed");
  return n;
}

}  // namespace sara
