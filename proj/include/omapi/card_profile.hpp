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

#ifndef OMAPI_CARD_PROFILE_HPP
#define OMAPI_CARD_PROFILE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "omapi/access_control.hpp"
#include "omapi/vuicc.hpp"

namespace omapi {

class ProfileError : public std::runtime_error {
public:
    explicit ProfileError(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

// Declarative card description: ATR, scripted applets, files and access
// rules. Serialized as JSON; all byte fields are lowercase hex strings.
// When access rules are present, build_card() registers a rule applet that
// answers the enforcer's fetch command with the encoded rule blob.
struct CardProfile {
    struct FileEntry {
        uint16_t file_id = 0;
        std::string path;
        Bytes content;

        bool operator==(const FileEntry&) const = default;
    };

    Bytes atr{0x3B, 0x00};
    std::vector<AppletScript> applets;
    std::vector<FileEntry> files;
    bool has_rules = false;
    std::vector<AccessRule> rules;
    Bytes ara_aid = kAraAid;

    static CardProfile parse(const std::string& text);
    static CardProfile load(const std::string& path);
    std::string dump() const;

    VirtualCard build_card() const;

    bool operator==(const CardProfile&) const = default;
};

}  // namespace omapi

#endif  // OMAPI_CARD_PROFILE_HPP
