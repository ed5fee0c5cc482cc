// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crowdagg::csv {

// RFC 4180 records: comma-separated fields, '"' quoting, doubled quotes
// inside quoted fields, quoted fields may span lines. Accepts \n and \r\n.
std::vector<std::vector<std::string>> parse(std::string_view text);

std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

// Quotes the field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join_row(std::span<const std::string> fields);

class Writer {
  public:
    explicit Writer(const std::filesystem::path& path);
    void row(std::span<const std::string> fields);
    void row(std::initializer_list<std::string> fields);
    // Flushes and throws IoError if the stream went bad.
    void close();

  private:
    std::ofstream out_;
    std::filesystem::path path_;
};

}  // namespace crowdagg::csv
