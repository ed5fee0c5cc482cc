// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <string_view>

namespace crowdagg {

// Porter suffix-stripping stemmer for lowercase English words, matching the
// reference implementation (including its documented departures: words of
// length <= 2 untouched, bli->ble, logi->log).
std::string porter_stem(std::string_view word);

}  // namespace crowdagg
