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

#include "omapi/hex.hpp"

namespace omapi {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_char_to_int(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    throw HexError(HexErrorKind::kInvalidHexChar,
                   std::string("invalid hex char '") + c + "'", c);
}

}  // namespace

std::string bytes_to_hex(BytesView bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(kHexDigits[(b >> 4) & 0xF]);
        out.push_back(kHexDigits[b & 0xF]);
    }
    return out;
}

std::optional<std::string> bytes_to_hex(const std::optional<Bytes>& bytes) {
    if (!bytes) {
        return std::nullopt;
    }
    return bytes_to_hex(BytesView(*bytes));
}

Bytes hex_to_bytes(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        throw HexError(HexErrorKind::kOddLength, "odd-length hex string");
    }
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        out[i / 2] = static_cast<uint8_t>((hex_char_to_int(hex[i]) << 4) |
                                          hex_char_to_int(hex[i + 1]));
    }
    return out;
}

std::optional<Bytes> hex_to_bytes(const std::optional<std::string>& hex) {
    if (!hex) {
        return std::nullopt;
    }
    return hex_to_bytes(std::string_view(*hex));
}

bool is_valid_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        return false;
    }
    for (char c : hex) {
        bool ok = (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F') ||
                  (c >= 'a' && c <= 'f');
        if (!ok) {
            return false;
        }
    }
    return true;
}

}  // namespace omapi
