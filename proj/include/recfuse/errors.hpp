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

/// Malformed or inconsistent input data (bad records, corrupt files, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Training blew up: the objective became non-finite or kept growing.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int epoch)
        : std::runtime_error(what), epoch_(epoch) {}

    int epoch() const { return epoch_; }

private:
    int epoch_;
};

}  // namespace recfuse
