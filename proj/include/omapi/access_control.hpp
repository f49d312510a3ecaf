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

#ifndef OMAPI_ACCESS_CONTROL_HPP
#define OMAPI_ACCESS_CONTROL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "omapi/hex.hpp"
#include "omapi/terminal.hpp"

namespace omapi {

// Default AID of the access rule application; card profiles may override it.
inline const Bytes kAraAid{0xA0, 0x00, 0x00, 0x01, 0x51, 0x41, 0x43, 0x4C, 0x00};

// GET DATA command fetching the whole rule blob from the rule applet.
inline const Bytes kFetchAllRulesApdu{0x80, 0xCA, 0xFF, 0x40, 0x00};

enum class Policy : uint8_t {
    kDeny = 0x00,
    kAllow = 0x01,
    kFiltered = 0x02,
};

struct ApduFilter {
    std::array<uint8_t, 4> header{};
    std::array<uint8_t, 4> mask{};

    bool matches(std::span<const uint8_t, 4> apdu_header) const;

    bool operator==(const ApduFilter&) const = default;
};

// One access rule: absent refs mean "any applet" / "any client".
struct AccessRule {
    std::optional<Bytes> aid_ref;
    std::optional<Bytes> cert_ref;
    Policy policy = Policy::kDeny;
    std::vector<ApduFilter> filters;  // non-empty iff policy is Filtered

    bool operator==(const AccessRule&) const = default;
};

struct RuleDatabase {
    std::vector<AccessRule> rules;
    bool present = false;  // rule applet found on the card
};

class RuleParseError : public std::runtime_error {
public:
    explicit RuleParseError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

// Rule blob format, repeated records:
//   [aid_len:1][aid][hash_len:1][hash][policy:1][n_filters:1][8 bytes each]
// aid_len 0 / hash_len 0 encode "any"; policy 00 deny, 01 allow, 02 filtered.
Bytes encode_rules(std::span<const AccessRule> rules);
std::vector<AccessRule> parse_rule_blob(BytesView blob);

struct ClientIdentity {
    std::optional<Bytes> cert_hash;  // absent = anonymous

    bool operator==(const ClientIdentity&) const = default;
};

enum class Decision {
    kAllow,
    kDeny,
};

// Fetches the rule database from the card's rule applet over the given
// terminal. A missing applet yields an absent database (present = false).
RuleDatabase load_rules(TerminalContract& terminal, BytesView ara_aid);
RuleDatabase load_rules(TerminalContract& terminal);

// Most specific matching rule by (specific aid + specific cert) >
// (specific aid + any) > (any + specific cert) > (any + any).
const AccessRule* find_governing_rule(const RuleDatabase& db,
                                      const ClientIdentity& client,
                                      const std::optional<Bytes>& aid);

// Channel-open gate. An absent database allows by default (open world)
// unless open_world is false; with a database present, no matching rule
// denies. A Filtered rule allows at open time.
Decision decide_channel_open(const RuleDatabase& db,
                             const ClientIdentity& client,
                             const std::optional<Bytes>& aid,
                             bool open_world = true);

// Per-APDU gate for a channel whose open was allowed.
Decision decide_apdu(const RuleDatabase& db, const ClientIdentity& client,
                     const std::optional<Bytes>& aid,
                     std::span<const uint8_t, 4> apdu_header,
                     bool open_world = true);

}  // namespace omapi

#endif  // OMAPI_ACCESS_CONTROL_HPP
