// Copyright 2026 The MCB-MSN Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mcb::csv {

/// Shortest round-tripping decimal ("%.17g"), with "inf"/"-inf"/"nan" spelled out.
std::string number(double v);

using Row = std::vector<std::string>;

void write_row(std::ostream& os, const Row& row);

/// Minimal reader for the files this project writes: comma separated, no
/// quoting. Blank lines are skipped.
std::vector<Row> read(std::istream& is);

std::vector<Row> read_file(const std::string& path);

}  // namespace mcb::csv
