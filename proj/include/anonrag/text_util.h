// Copyright 2026 The AnonRAG Authors
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

#ifndef ANONRAG_TEXT_UTIL_H_
#define ANONRAG_TEXT_UTIL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anonrag {

// Number of UTF-8 code points. Invalid lead bytes count as one each.
std::size_t Utf8Length(std::string_view text);

// Byte length of the code point starting at text[pos].
std::size_t Utf8SequenceLength(std::string_view text, std::size_t pos);

bool IsAsciiSpace(char c);
bool IsAsciiAlnum(char c);
bool IsAsciiAlpha(char c);
bool IsAsciiUpper(char c);

std::string ToLowerAscii(std::string_view text);
std::string_view Trim(std::string_view text);

// Stable 64-bit FNV-1a. Used wherever a hash must not change across
// platforms or runs.
std::uint64_t Fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t SplitMix64(std::uint64_t& state);

// Mixes a base seed with a textual key into an independent stream seed.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key);

// Shortest decimal that round-trips the double ("1", "0.5", "150").
std::string FormatNumber(double value);
std::optional<double> ParseNumber(std::string_view text);

bool StartsWith(std::string_view text, std::string_view prefix);
void ReplaceAll(std::string& text, std::string_view from, std::string_view to);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace anonrag

#endif  // ANONRAG_TEXT_UTIL_H_
