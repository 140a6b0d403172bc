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

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mcb {

/// Opaque node identifier. Ids are dense indices into Topology::nodes.
struct NodeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr bool operator==(const Point&) const = default;
};

double distance(const Point& a, const Point& b);

// Error hierarchy. Everything thrown by the library derives from Error so
// callers can catch one type at the boundary (the CLI does).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A link whose required transmit power exceeds the transmitter's maximum.
class LinkInfeasible : public Error {
 public:
  LinkInfeasible(double required_dbm, double max_dbm);

  double required_dbm() const { return required_dbm_; }
  double max_dbm() const { return max_dbm_; }

 private:
  double required_dbm_;
  double max_dbm_;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace mcb

template <>
struct std::hash<mcb::NodeId> {
  std::size_t operator()(const mcb::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
