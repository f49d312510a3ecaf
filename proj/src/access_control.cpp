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

#include "omapi/access_control.hpp"

#include <algorithm>
#include <set>

#include "omapi/apdu.hpp"

namespace omapi {

namespace {

bool ref_matches(const std::optional<Bytes>& ref,
                 const std::optional<Bytes>& value) {
    if (!ref) {
        return true;  // "any"
    }
    return value && std::ranges::equal(*ref, *value);
}

// Specificity levels, most specific first.
int specificity(const AccessRule& rule) {
    if (rule.aid_ref && rule.cert_ref) {
        return 0;
    }
    if (rule.aid_ref) {
        return 1;
    }
    if (rule.cert_ref) {
        return 2;
    }
    return 3;
}

void validate_rule(const AccessRule& rule) {
    if (rule.policy == Policy::kFiltered && rule.filters.empty()) {
        throw RuleParseError("filtered rule without filters");
    }
    if (rule.policy != Policy::kFiltered && !rule.filters.empty()) {
        throw RuleParseError("filter list on a non-filtered rule");
    }
    if (rule.aid_ref && rule.aid_ref->size() > 0xFF) {
        throw RuleParseError("AID reference too long");
    }
    if (rule.cert_ref && rule.cert_ref->size() > 0xFF) {
        throw RuleParseError("certificate reference too long");
    }
}

}  // namespace

bool ApduFilter::matches(std::span<const uint8_t, 4> apdu_header) const {
    for (size_t i = 0; i < 4; ++i) {
        if ((apdu_header[i] & mask[i]) != (header[i] & mask[i])) {
            return false;
        }
    }
    return true;
}

Bytes encode_rules(std::span<const AccessRule> rules) {
    std::set<std::pair<std::optional<Bytes>, std::optional<Bytes>>> seen;
    Bytes out;
    for (const AccessRule& rule : rules) {
        validate_rule(rule);
        if (!seen.insert({rule.aid_ref, rule.cert_ref}).second) {
            throw RuleParseError("duplicate (aid, cert) rule pair");
        }
        if (rule.filters.size() > 0xFF) {
            throw RuleParseError("too many filters in one rule");
        }

        const Bytes empty;
        const Bytes& aid = rule.aid_ref ? *rule.aid_ref : empty;
        const Bytes& cert = rule.cert_ref ? *rule.cert_ref : empty;
        out.push_back(static_cast<uint8_t>(aid.size()));
        out.insert(out.end(), aid.begin(), aid.end());
        out.push_back(static_cast<uint8_t>(cert.size()));
        out.insert(out.end(), cert.begin(), cert.end());
        out.push_back(static_cast<uint8_t>(rule.policy));
        out.push_back(static_cast<uint8_t>(rule.filters.size()));
        for (const ApduFilter& filter : rule.filters) {
            out.insert(out.end(), filter.header.begin(), filter.header.end());
            out.insert(out.end(), filter.mask.begin(), filter.mask.end());
        }
    }
    return out;
}

std::vector<AccessRule> parse_rule_blob(BytesView blob) {
    std::vector<AccessRule> rules;
    std::set<std::pair<std::optional<Bytes>, std::optional<Bytes>>> seen;
    size_t pos = 0;

    auto need = [&](size_t n) {
        if (blob.size() - pos < n) {
            throw RuleParseError("rule blob truncated at offset " +
                                 std::to_string(pos));
        }
    };

    while (pos < blob.size()) {
        AccessRule rule;

        need(1);
        const size_t aid_len = blob[pos++];
        if (aid_len > 0) {
            need(aid_len);
            rule.aid_ref = Bytes(blob.begin() + pos, blob.begin() + pos + aid_len);
            pos += aid_len;
        }

        need(1);
        const size_t hash_len = blob[pos++];
        if (hash_len > 0) {
            need(hash_len);
            rule.cert_ref =
                Bytes(blob.begin() + pos, blob.begin() + pos + hash_len);
            pos += hash_len;
        }

        need(2);
        const uint8_t policy_byte = blob[pos++];
        if (policy_byte > 0x02) {
            throw RuleParseError("unknown policy byte " +
                                 std::to_string(policy_byte));
        }
        rule.policy = static_cast<Policy>(policy_byte);

        const size_t n_filters = blob[pos++];
        for (size_t i = 0; i < n_filters; ++i) {
            need(8);
            ApduFilter filter;
            std::copy_n(blob.begin() + pos, 4, filter.header.begin());
            std::copy_n(blob.begin() + pos + 4, 4, filter.mask.begin());
            pos += 8;
            rule.filters.push_back(filter);
        }

        validate_rule(rule);
        if (!seen.insert({rule.aid_ref, rule.cert_ref}).second) {
            throw RuleParseError("duplicate (aid, cert) rule pair");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

RuleDatabase load_rules(TerminalContract& terminal, BytesView ara_aid) {
    RuleDatabase db;

    int channel_number = 0;
    try {
        channel_number = terminal.internal_open_logical_channel(
            Bytes(ara_aid.begin(), ara_aid.end()));
    } catch (const TerminalError& err) {
        if (err.kind() == TerminalErrorKind::kNoSuchElement) {
            return db;  // no rule applet on this card
        }
        throw;
    }

    Bytes response;
    try {
        Bytes fetch = kFetchAllRulesApdu;
        fetch[0] = set_cla_channel(fetch[0], channel_number);
        response = terminal.internal_transmit(BytesView(fetch));
    } catch (...) {
        terminal.internal_close_logical_channel(channel_number);
        throw;
    }
    terminal.internal_close_logical_channel(channel_number);

    if (response.size() < 2 || !sw_success(response[response.size() - 2])) {
        throw RuleParseError("rule applet refused the fetch command");
    }
    response.resize(response.size() - 2);

    db.rules = parse_rule_blob(BytesView(response));
    db.present = true;
    return db;
}

RuleDatabase load_rules(TerminalContract& terminal) {
    return load_rules(terminal, BytesView(kAraAid));
}

const AccessRule* find_governing_rule(const RuleDatabase& db,
                                      const ClientIdentity& client,
                                      const std::optional<Bytes>& aid) {
    const AccessRule* best = nullptr;
    int best_level = 4;
    for (const AccessRule& rule : db.rules) {
        if (!ref_matches(rule.aid_ref, aid) ||
            !ref_matches(rule.cert_ref, client.cert_hash)) {
            continue;
        }
        const int level = specificity(rule);
        if (level < best_level) {
            best = &rule;
            best_level = level;
        }
    }
    return best;
}

Decision decide_channel_open(const RuleDatabase& db,
                             const ClientIdentity& client,
                             const std::optional<Bytes>& aid,
                             bool open_world) {
    if (!db.present) {
        return open_world ? Decision::kAllow : Decision::kDeny;
    }
    const AccessRule* rule = find_governing_rule(db, client, aid);
    if (rule == nullptr) {
        return Decision::kDeny;
    }
    // Filtered counts as allow at open time.
    return rule->policy == Policy::kDeny ? Decision::kDeny : Decision::kAllow;
}

Decision decide_apdu(const RuleDatabase& db, const ClientIdentity& client,
                     const std::optional<Bytes>& aid,
                     std::span<const uint8_t, 4> apdu_header,
                     bool open_world) {
    if (!db.present) {
        return open_world ? Decision::kAllow : Decision::kDeny;
    }
    const AccessRule* rule = find_governing_rule(db, client, aid);
    if (rule == nullptr || rule->policy == Policy::kDeny) {
        // Unreachable for channels that passed the open gate; deny anyway.
        return Decision::kDeny;
    }
    if (rule->policy == Policy::kAllow) {
        return Decision::kAllow;
    }
    for (const ApduFilter& filter : rule->filters) {
        if (filter.matches(apdu_header)) {
            return Decision::kAllow;
        }
    }
    return Decision::kDeny;
}

}  // namespace omapi
