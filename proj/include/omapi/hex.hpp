/*
 * Copyright (C) 2026 The omapi-stack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OMAPI_HEX_HPP
#define OMAPI_HEX_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace omapi {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

enum class HexErrorKind {
    kInvalidHexChar,
    kOddLength,
};

class HexError : public std::runtime_error {
public:
    HexError(HexErrorKind kind, const std::string& what_arg, char offending = '\0')
        : std::runtime_error(what_arg), kind_(kind), offending_(offending) {}

    HexErrorKind kind() const { return kind_; }
    char offending_char() const { return offending_; }

private:
    HexErrorKind kind_;
    char offending_;
};

// Lowercase, two digits per byte, no separators.
std::string bytes_to_hex(BytesView bytes);
std::optional<std::string> bytes_to_hex(const std::optional<Bytes>& bytes);
inline std::string bytes_to_hex(const Bytes& bytes) {
    return bytes_to_hex(BytesView(bytes));
}

// Accepts both cases. Rejects odd-length input instead of truncating.
Bytes hex_to_bytes(std::string_view hex);
std::optional<Bytes> hex_to_bytes(const std::optional<std::string>& hex);
inline Bytes hex_to_bytes(const char* hex) {
    return hex_to_bytes(std::string_view(hex));
}
inline Bytes hex_to_bytes(const std::string& hex) {
    return hex_to_bytes(std::string_view(hex));
}

bool is_valid_hex(std::string_view hex);

}  // namespace omapi

#endif  // OMAPI_HEX_HPP
