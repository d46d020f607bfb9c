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

#include "trajldp/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "trajldp/errors.hpp"

namespace trajldp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

Point parse_point(std::string_view token, std::size_t line) {
  const auto c1 = token.find(',');
  if (c1 == std::string_view::npos) {
    throw ParseError(line, "point '" + std::string(token) + "' needs x,y");
  }
  const auto rest = token.substr(c1 + 1);
  const auto c2 = rest.find(',');
  const double x = parse_number(token.substr(0, c1), line);
  const double y = parse_number(rest.substr(0, c2), line);
  if (c2 != std::string_view::npos) {
    const auto extra = rest.substr(c2 + 1);
    if (extra.find(',') != std::string_view::npos) {
      throw ParseError(line, "point '" + std::string(token) + "' has too many fields");
    }
    parse_number(extra, line);  // timestamp, validated then dropped
  }
  return {x, y};
}

}  // namespace

BoundingBox padded_bounds(const RawCorpus& corpus) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  BoundingBox b{kInf, kInf, -kInf, -kInf};
  for (const auto& t : corpus) {
    for (const Point& p : t) {
      b.min_x = std::min(b.min_x, p.x());
      b.min_y = std::min(b.min_y, p.y());
      b.max_x = std::max(b.max_x, p.x());
      b.max_y = std::max(b.max_y, p.y());
    }
  }
  if (b.min_x > b.max_x) throw DomainError("corpus has no points");
  auto pad = [](double& lo, double& hi) {
    const double extent = hi - lo;
    const double half = extent > 0.0 ? 0.0005 * extent : 0.5;
    lo -= half;
    hi += half;
  };
  pad(b.min_x, b.max_x);
  pad(b.min_y, b.max_y);
  return b;
}

LoadedCorpus parse_corpus(std::istream& in) {
  LoadedCorpus out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto semi = line.find(';');
    if (semi == std::string_view::npos) throw ParseError(line_no, "missing ';' after id");
    const std::string_view id = trim(line.substr(0, semi));
    if (id.empty()) throw ParseError(line_no, "empty trajectory id");
    RawTrajectory traj;
    std::string_view rest = line.substr(semi + 1);
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(" \t");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = std::min(rest.find_first_of(" \t"), rest.size());
      traj.push_back(parse_point(rest.substr(0, end), line_no));
      rest.remove_prefix(end);
    }
    if (traj.empty()) throw ParseError(line_no, "trajectory has no points");
    out.ids.emplace_back(id);
    out.trajectories.push_back(std::move(traj));
  }
  if (out.trajectories.empty()) throw ParseError(line_no, "corpus is empty");
  out.bbox = padded_bounds(out.trajectories);
  return out;
}

LoadedCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus '" + path + "'");
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const RawCorpus& corpus,
                  const std::vector<std::string>& ids) {
  if (!ids.empty() && ids.size() != corpus.size()) {
    throw DomainError("id count does not match corpus size");
  }
  char buf[64];
  std::string line;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    line = ids.empty() ? std::to_string(i) : ids[i];
    line += ';';
    for (std::size_t j = 0; j < corpus[i].size(); ++j) {
      if (j) line += ' ';
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", corpus[i][j].x(), corpus[i][j].y());
      line += buf;
    }
    line += '\n';
    out << line;
  }
}

void save_corpus(const std::string& path, const RawCorpus& corpus,
                 const std::vector<std::string>& ids) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_corpus(out, corpus, ids);
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace trajldp
