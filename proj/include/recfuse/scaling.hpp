// Copyright 2026 The recfuse Authors.
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

#include <stdexcept>
#include <string>

namespace recfuse {

/// Closed interval [lo, hi] on the raw or model scale.
struct ScaleInterval {
    double lo = -1.0;
    double hi = +1.0;

    bool valid() const { return lo < hi; }
    double width() const { return hi - lo; }

    friend bool operator==(const ScaleInterval&, const ScaleInterval&) = default;
};

/// The [1,5] star-rating scale.
inline constexpr ScaleInterval kRatingInterval{1.0, 5.0};

/// The [-1,+1] range the link function produces.
inline constexpr ScaleInterval kModelInterval{-1.0, +1.0};

/// Affine map of x from [a,b] onto [c,d]: x' = c + (x-a)(d-c)/(b-a).
inline double scale_value(double x, ScaleInterval from, ScaleInterval to) {
    if (!from.valid() || !to.valid())
        throw std::domain_error("scale_value: degenerate interval");
    if (x < from.lo || x > from.hi)
        throw std::domain_error("scale_value: " + std::to_string(x) +
                                " outside [" + std::to_string(from.lo) + ", " +
                                std::to_string(from.hi) + "]");
    return to.lo + (x - from.lo) * (to.width() / from.width());
}

/// Inverse of scale_value over the same interval pair.
inline double unscale_value(double x, ScaleInterval from, ScaleInterval to) {
    return scale_value(x, to, from);
}

}  // namespace recfuse
