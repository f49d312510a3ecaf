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

#include "omapi/card_profile.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace omapi {

namespace {

using nlohmann::json;

Bytes hex_field(const json& obj, const std::string& key, bool required,
                const Bytes& fallback = {}) {
    if (!obj.contains(key)) {
        if (required) {
            throw ProfileError("missing field '" + key + "'");
        }
        return fallback;
    }
    if (!obj[key].is_string()) {
        throw ProfileError("field '" + key + "' must be a hex string");
    }
    try {
        return hex_to_bytes(std::string_view(obj[key].get<std::string>()));
    } catch (const HexError& err) {
        throw ProfileError("field '" + key + "': " + err.what());
    }
}

uint8_t hex_byte_field(const json& obj, const std::string& key) {
    const Bytes raw = hex_field(obj, key, true);
    if (raw.size() != 1) {
        throw ProfileError("field '" + key + "' must be one byte");
    }
    return raw[0];
}

std::string to_hex_string(BytesView bytes) { return bytes_to_hex(bytes); }

ApduHandler parse_handler(const json& obj) {
    ApduHandler handler;
    handler.ins = hex_byte_field(obj, "ins");
    if (obj.contains("p1")) {
        handler.p1 = hex_byte_field(obj, "p1");
    }
    if (obj.contains("p2")) {
        handler.p2 = hex_byte_field(obj, "p2");
    }
    handler.reply = hex_field(obj, "reply", true);
    return handler;
}

json dump_handler(const ApduHandler& handler) {
    json obj;
    obj["ins"] = to_hex_string(BytesView(&handler.ins, 1));
    if (handler.p1) {
        obj["p1"] = to_hex_string(BytesView(&*handler.p1, 1));
    }
    if (handler.p2) {
        obj["p2"] = to_hex_string(BytesView(&*handler.p2, 1));
    }
    obj["reply"] = to_hex_string(BytesView(handler.reply));
    return obj;
}

Policy parse_policy(const std::string& name) {
    if (name == "deny") {
        return Policy::kDeny;
    }
    if (name == "allow") {
        return Policy::kAllow;
    }
    if (name == "filtered") {
        return Policy::kFiltered;
    }
    throw ProfileError("unknown policy '" + name + "'");
}

std::string policy_name(Policy policy) {
    switch (policy) {
        case Policy::kDeny:
            return "deny";
        case Policy::kAllow:
            return "allow";
        case Policy::kFiltered:
            return "filtered";
    }
    return "deny";
}

AccessRule parse_rule(const json& obj) {
    AccessRule rule;
    // Empty or missing refs mean "any".
    const Bytes aid = hex_field(obj, "aid", false);
    if (!aid.empty()) {
        rule.aid_ref = aid;
    }
    const Bytes hash = hex_field(obj, "hash", false);
    if (!hash.empty()) {
        rule.cert_ref = hash;
    }
    if (!obj.contains("policy") || !obj["policy"].is_string()) {
        throw ProfileError("access rule requires a 'policy' string");
    }
    rule.policy = parse_policy(obj["policy"].get<std::string>());
    if (obj.contains("filters")) {
        for (const json& f : obj["filters"]) {
            ApduFilter filter;
            const Bytes header = hex_field(f, "header", true);
            const Bytes mask = hex_field(f, "mask", true);
            if (header.size() != 4 || mask.size() != 4) {
                throw ProfileError("filter header and mask must be 4 bytes");
            }
            std::copy(header.begin(), header.end(), filter.header.begin());
            std::copy(mask.begin(), mask.end(), filter.mask.begin());
            rule.filters.push_back(filter);
        }
    }
    if (rule.policy == Policy::kFiltered && rule.filters.empty()) {
        throw ProfileError("filtered rule requires at least one filter");
    }
    if (rule.policy != Policy::kFiltered && !rule.filters.empty()) {
        throw ProfileError("only filtered rules may carry filters");
    }
    return rule;
}

json dump_rule(const AccessRule& rule) {
    json obj;
    obj["aid"] = rule.aid_ref ? to_hex_string(BytesView(*rule.aid_ref)) : "";
    obj["hash"] = rule.cert_ref ? to_hex_string(BytesView(*rule.cert_ref)) : "";
    obj["policy"] = policy_name(rule.policy);
    if (!rule.filters.empty()) {
        json filters = json::array();
        for (const ApduFilter& f : rule.filters) {
            filters.push_back(
                {{"header", to_hex_string(BytesView(f.header))},
                 {"mask", to_hex_string(BytesView(f.mask))}});
        }
        obj["filters"] = filters;
    }
    return obj;
}

}  // namespace

CardProfile CardProfile::parse(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ProfileError(std::string("profile is not valid JSON: ") +
                           err.what());
    }
    if (!root.is_object()) {
        throw ProfileError("profile root must be a JSON object");
    }

    CardProfile profile;
    profile.atr = hex_field(root, "atr", false, {0x3B, 0x00});
    if (profile.atr.size() > 0xFF) {
        throw ProfileError("ATR longer than 255 bytes");
    }

    if (root.contains("applets")) {
        for (const json& a : root["applets"]) {
            std::vector<ApduHandler> handlers;
            if (a.contains("handlers")) {
                for (const json& h : a["handlers"]) {
                    handlers.push_back(parse_handler(h));
                }
            }
            try {
                profile.applets.emplace_back(
                    hex_field(a, "aid", true),
                    hex_field(a, "select_response", true), std::move(handlers),
                    hex_field(a, "default_reply", false, {0x6D, 0x00}));
            } catch (const std::invalid_argument& err) {
                throw ProfileError(std::string("bad applet: ") + err.what());
            }
        }
    }

    if (root.contains("files")) {
        for (const json& f : root["files"]) {
            FileEntry entry;
            const Bytes id = hex_field(f, "file_id", true);
            if (id.size() != 2) {
                throw ProfileError("file_id must be two bytes");
            }
            entry.file_id = static_cast<uint16_t>((id[0] << 8) | id[1]);
            if (!f.contains("path") || !f["path"].is_string()) {
                throw ProfileError("file entry requires a 'path' string");
            }
            entry.path = f["path"].get<std::string>();
            entry.content = hex_field(f, "content", true);
            profile.files.push_back(std::move(entry));
        }
    }

    if (root.contains("access_rules") && !root["access_rules"].is_null()) {
        profile.has_rules = true;
        for (const json& r : root["access_rules"]) {
            profile.rules.push_back(parse_rule(r));
        }
        // Encoding validates duplicates and filter shapes.
        try {
            encode_rules(profile.rules);
        } catch (const RuleParseError& err) {
            throw ProfileError(std::string("bad access rules: ") + err.what());
        }
    }
    profile.ara_aid = hex_field(root, "ara_aid", false, kAraAid);

    return profile;
}

CardProfile CardProfile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ProfileError("cannot open profile '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string CardProfile::dump() const {
    json root;
    root["atr"] = to_hex_string(BytesView(atr));

    json applet_list = json::array();
    for (const AppletScript& applet : applets) {
        json a;
        a["aid"] = to_hex_string(BytesView(applet.aid()));
        a["select_response"] = to_hex_string(BytesView(applet.select_response()));
        json handler_list = json::array();
        for (const ApduHandler& handler : applet.handlers()) {
            handler_list.push_back(dump_handler(handler));
        }
        a["handlers"] = handler_list;
        a["default_reply"] = to_hex_string(BytesView(applet.default_reply()));
        applet_list.push_back(a);
    }
    root["applets"] = applet_list;

    json file_list = json::array();
    for (const FileEntry& entry : files) {
        const Bytes id{static_cast<uint8_t>(entry.file_id >> 8),
                       static_cast<uint8_t>(entry.file_id & 0xFF)};
        file_list.push_back({{"file_id", to_hex_string(BytesView(id))},
                             {"path", entry.path},
                             {"content", to_hex_string(BytesView(entry.content))}});
    }
    root["files"] = file_list;

    if (has_rules) {
        json rule_list = json::array();
        for (const AccessRule& rule : rules) {
            rule_list.push_back(dump_rule(rule));
        }
        root["access_rules"] = rule_list;
        root["ara_aid"] = to_hex_string(BytesView(ara_aid));
    }

    return root.dump(2) + "\n";
}

VirtualCard CardProfile::build_card() const {
    VirtualCard card;
    card.set_atr(atr);
    for (const AppletScript& applet : applets) {
        card.add_applet(applet);
    }
    for (const FileEntry& entry : files) {
        card.add_file(entry.file_id, entry.path, entry.content);
    }
    if (has_rules) {
        Bytes reply = encode_rules(rules);
        const Bytes sw = sw_bytes(kSwSuccess);
        reply.insert(reply.end(), sw.begin(), sw.end());
        card.add_applet(AppletScript(
            ara_aid, sw_bytes(kSwSuccess),
            {ApduHandler{0xCA, uint8_t{0xFF}, uint8_t{0x40}, std::move(reply)}},
            sw_bytes(kSwInsNotSupported)));
    }
    return card;
}

}  // namespace omapi
