// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geonace::str {

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);
std::string upper(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
bool istarts_with(std::string_view s, std::string_view prefix);
// Case-insensitive containment for ASCII text.
bool icontains(std::string_view haystack, std::string_view needle);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace geonace::str
