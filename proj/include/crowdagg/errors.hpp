// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace crowdagg {

// File missing or unreadable/unwritable.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally broken input (missing column, bad number, wrong dimensionality).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Task configuration violates its invariants.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace crowdagg
