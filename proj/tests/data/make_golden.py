#!/usr/bin/env python3
# Copyright 2026 The SARA Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes golden_v1.sara without going through the C++ encoder.

Tensor: 2 x 3 x 4, element i = float32(i / 7 - 1), except element 5 = -0.0
and element 11 = the smallest positive subnormal.
"""
import struct
import sys

dims = (2, 3, 4)
values = [struct.unpack("<f", struct.pack("<f", i / 7.0 - 1.0))[0] for i in range(24)]
blob = bytearray(b"SARA")
blob += struct.pack("<BBBB", 1, 1, len(dims), 0)
blob += struct.pack("<%dI" % len(dims), *dims)
for i, v in enumerate(values):
    if i == 5:
        blob += struct.pack("<I", 0x80000000)
    elif i == 11:
        blob += struct.pack("<I", 0x00000001)
    else:
        blob += struct.pack("<f", v)

out = sys.argv[1] if len(sys.argv) > 1 else "golden_v1.sara"
with open(out, "wb") as f:
    f.write(blob)
