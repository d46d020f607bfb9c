// Copyright 2026 The trajldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJLDP_CORPUS_IO_HPP_
#define TRAJLDP_CORPUS_IO_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "trajldp/grid.hpp"
#include "trajldp/metrics.hpp"

namespace trajldp {

struct LoadedCorpus {
  std::vector<std::string> ids;
  RawCorpus trajectories;
  // Tight bounds widened by 0.1% of each extent.
  BoundingBox bbox;
};

// One trajectory per line: `id;x1,y1 x2,y2 ...`. A third per-point field
// (timestamp) is accepted and ignored. Blank lines are skipped.
LoadedCorpus parse_corpus(std::istream& in);
LoadedCorpus load_corpus(const std::string& path);

BoundingBox padded_bounds(const RawCorpus& corpus);

// Coordinates are written with 17 significant digits. Ids default to the
// zero-based line index.
void write_corpus(std::ostream& out, const RawCorpus& corpus,
                  const std::vector<std::string>& ids = {});
void save_corpus(const std::string& path, const RawCorpus& corpus,
                 const std::vector<std::string>& ids = {});

}  // namespace trajldp

#endif  // TRAJLDP_CORPUS_IO_HPP_
