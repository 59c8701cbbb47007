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

#ifndef SARA_FORMAT_HPP_
#define SARA_FORMAT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sara/tensor.hpp"

namespace sara {

// SARA container, little-endian:
//   "SARA" | version u8 = 1 | dtype u8 = 1 (real32) | ndim u8 | pad u8 = 0
//   ndim x u32 dims (outermost first) | row-major float32 data
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::uint8_t kDtypeReal32 = 1;
inline constexpr std::size_t kHeaderBytes = 8;

/// Returns the number of bytes written. Throws kInvalidArgument for empty or
/// zero dims and kIoError when the sink fails.
std::size_t WriteTensor(const RawTensor& t, std::ostream& sink);
std::vector<std::uint8_t> EncodeTensor(const RawTensor& t);

/// Errors: kBadMagic, kUnsupportedVersion, kTruncatedStream, kInvalidArgument
/// (unknown dtype, zero dims).
RawTensor ReadTensor(std::istream& source);
RawTensor DecodeTensor(std::span<const std::uint8_t> bytes);

RawTensor ReadTensorFile(const std::string& path);
std::size_t WriteTensorFile(const RawTensor& t, const std::string& path);

}  // namespace sara

#endif  // SARA_FORMAT_HPP_
