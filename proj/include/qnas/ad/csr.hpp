// Copyright 2026 The qnas Authors. All Rights Reserved.
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

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace qnas::ad {

// Message index for graph operators: entries grouped by destination segment.
// Entry e carries a message from node src[e] into segment dst[e]; within a
// segment, entries are ordered by ascending src.
struct Csr {
  std::size_t num_segments = 0;
  std::size_t num_sources = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> src;
  std::vector<std::uint32_t> dst;
  std::vector<double> weight;
  std::size_t max_segment = 0;

  std::size_t num_entries() const noexcept { return src.size(); }
  std::size_t segment_size(std::size_t s) const noexcept { return offsets[s + 1] - offsets[s]; }

  // lists[s] = (source, weight) pairs for segment s; sorted by source here.
  static Csr from_lists(std::size_t num_sources,
                        std::vector<std::vector<std::pair<std::uint32_t, double>>> lists);
};

using CsrPtr = std::shared_ptr<const Csr>;

}  // namespace qnas::ad
