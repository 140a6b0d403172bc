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

namespace mcb {

/// Principal branch W0 of the Lambert W function: the w >= -1 solving
/// w * exp(w) = z, for z >= -1/e. Halley iteration from a branch-point
/// series (near -1/e), Winitzki's approximation (moderate z) or the
/// asymptotic log expansion (large z). Throws DomainError for z < -1/e.
double lambert_w0(double z);

}  // namespace mcb
