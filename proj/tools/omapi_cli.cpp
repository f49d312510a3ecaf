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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omapi/card_profile.hpp"
#include "omapi/modem.hpp"
#include "omapi/phone_service.hpp"
#include "omapi/transport.hpp"
#include "omapi/uicc_terminal.hpp"

namespace {

using namespace omapi;

constexpr int kExitOk = 0;
constexpr int kExitCommandError = 1;
constexpr int kExitUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The assembled stack plus the per-invocation session state. Channel numbers
// printed by `open` index the channel map for later transmit/close lines.
class CliContext {
public:
    CliContext(CardProfile profile, ClientIdentity client, bool trace,
               bool legacy, std::ostream& out)
        : profile_(std::move(profile)),
          modem_(profile_.build_card()),
          phone_(modem_),
          terminal_(std::make_shared<UiccTerminal>(phone_, modem_, legacy)),
          client_(std::move(client)),
          out_(out) {
        if (legacy) {
            modem_.set_legacy_select_response(true);
        }
        if (trace) {
            modem_.set_trace([this](const TraceEvent& event) {
                out_ << trace_request_line(BytesView(event.request_frame))
                     << "\n";
                if (event.response_payload) {
                    out_ << trace_response_line(
                                BytesView(*event.response_payload))
                         << "\n";
                } else {
                    out_ << trace_error_line(*event.error) << "\n";
                }
            });
        }
        service_.register_terminal(terminal_, TerminalKind::kSystem,
                                   profile_.ara_aid);
    }

    SeService& service() { return service_; }
    Modem& modem() { return modem_; }
    std::ostream& out() { return out_; }

    Session& session() {
        if (!session_) {
            session_ = service_.readers().front()->open_session(client_);
        }
        return *session_;
    }

    void add_channel(const std::shared_ptr<Channel>& channel) {
        channels_[channel->channel_number()] = channel;
    }

    std::shared_ptr<Channel> channel(int number) {
        auto it = channels_.find(number);
        if (it != channels_.end() && it->second->is_open()) {
            return it->second;
        }
        if (number == 0) {
            auto basic = session().open_basic_channel(std::nullopt);
            channels_[0] = basic;
            return basic;
        }
        throw TerminalError(TerminalErrorKind::kInvalidParameter,
                            "channel " + std::to_string(number) +
                                " is not open");
    }

    void drop_channel(int number) { channels_.erase(number); }

private:
    CardProfile profile_;
    Modem modem_;
    PhoneService phone_;
    std::shared_ptr<UiccTerminal> terminal_;
    SeService service_;
    ClientIdentity client_;
    std::ostream& out_;
    std::shared_ptr<Session> session_;
    std::map<int, std::shared_ptr<Channel>> channels_;
};

Bytes parse_hex_arg(const std::string& value, const std::string& flag) {
    if (!is_valid_hex(value)) {
        throw UsageError("argument of " + flag + " is not valid hex");
    }
    return hex_to_bytes(std::string_view(value));
}

std::string flag_value(const std::vector<std::string>& args, size_t& i,
                       const std::string& flag) {
    if (i + 1 >= args.size()) {
        throw UsageError("missing value for " + flag);
    }
    return args[++i];
}

std::string format_optional_hex(const std::optional<Bytes>& bytes) {
    return bytes ? bytes_to_hex(BytesView(*bytes)) : std::string("(none)");
}

int parse_channel_number(const std::string& value) {
    try {
        size_t pos = 0;
        const int number = std::stoi(value, &pos);
        if (pos != value.size() || number < 0 || number > 3) {
            throw UsageError("channel number must be 0..3");
        }
        return number;
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("channel number must be 0..3");
    }
}

void run_command(CliContext& ctx, const std::vector<std::string>& args);

void cmd_readers(CliContext& ctx) {
    for (Reader* reader : ctx.service().readers()) {
        ctx.out() << reader->name() << "\t"
                  << (reader->is_system() ? "system" : "add-on") << "\n";
    }
}

void cmd_atr(CliContext& ctx) {
    ctx.out() << format_optional_hex(ctx.session().get_atr()) << "\n";
}

void cmd_open(CliContext& ctx, const std::vector<std::string>& args) {
    std::optional<Bytes> aid;
    bool basic = false;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--aid") {
            aid = parse_hex_arg(flag_value(args, i, "--aid"), "--aid");
        } else if (args[i] == "--basic") {
            basic = true;
        } else {
            throw UsageError("unknown argument '" + args[i] + "' for open");
        }
    }
    std::shared_ptr<Channel> channel;
    if (basic) {
        channel = ctx.session().open_basic_channel(aid);
    } else {
        if (!aid) {
            throw UsageError("open requires --aid <hex>");
        }
        channel = ctx.session().open_logical_channel(BytesView(*aid));
    }
    ctx.add_channel(channel);
    ctx.out() << "channel: " << channel->channel_number() << "\n";
    ctx.out() << "select-response: "
              << format_optional_hex(channel->select_response()) << "\n";
}

void cmd_transmit(CliContext& ctx, const std::vector<std::string>& args) {
    std::optional<int> number;
    std::optional<Bytes> apdu;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--channel") {
            number = parse_channel_number(flag_value(args, i, "--channel"));
        } else if (args[i] == "--apdu") {
            apdu = parse_hex_arg(flag_value(args, i, "--apdu"), "--apdu");
        } else {
            throw UsageError("unknown argument '" + args[i] +
                             "' for transmit");
        }
    }
    if (!number || !apdu) {
        throw UsageError("transmit requires --channel <n> and --apdu <hex>");
    }
    const Bytes response = ctx.channel(*number)->transmit(BytesView(*apdu));
    ctx.out() << bytes_to_hex(BytesView(response)) << "\n";
}

void cmd_close(CliContext& ctx, const std::vector<std::string>& args) {
    std::optional<int> number;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--channel") {
            number = parse_channel_number(flag_value(args, i, "--channel"));
        } else {
            throw UsageError("unknown argument '" + args[i] + "' for close");
        }
    }
    if (!number) {
        throw UsageError("close requires --channel <n>");
    }
    auto channel = ctx.channel(*number);
    channel->close();
    ctx.drop_channel(*number);
}

void cmd_sim_state(CliContext& ctx, const std::vector<std::string>& args) {
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--set") {
            const std::string state = flag_value(args, i, "--set");
            if (state == "READY") {
                ctx.modem().set_card_present(true);
            } else if (state == "ABSENT") {
                ctx.modem().set_card_present(false);
            } else {
                throw UsageError("--set accepts READY or ABSENT");
            }
        } else {
            throw UsageError("unknown argument '" + args[i] +
                             "' for sim-state");
        }
    }
    ctx.out() << ctx.modem().sim_state() << "\n";
}

void cmd_script(CliContext& ctx, const std::vector<std::string>& args) {
    std::optional<std::string> path;
    bool keep_going = false;
    for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--keep-going") {
            keep_going = true;
        } else if (!path) {
            path = args[i];
        } else {
            throw UsageError("unexpected argument '" + args[i] +
                             "' for script");
        }
    }
    if (!path) {
        throw UsageError("script requires a file argument");
    }
    std::ifstream file(*path);
    if (!file) {
        throw UsageError("cannot open script '" + *path + "'");
    }

    bool failed = false;
    std::string line;
    while (std::getline(file, line)) {
        const size_t comment = line.find('#');
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        std::istringstream tokens(line);
        std::vector<std::string> words;
        std::string word;
        while (tokens >> word) {
            words.push_back(word);
        }
        if (words.empty()) {
            continue;
        }
        if (words[0] == "script") {
            throw UsageError("script files cannot nest scripts");
        }
        try {
            run_command(ctx, words);
        } catch (...) {
            if (!keep_going) {
                throw;
            }
            failed = true;
            try {
                throw;
            } catch (const UsageError& err) {
                std::cerr << "error: " << err.what() << "\n";
            } catch (const std::exception& err) {
                std::cerr << err.what() << "\n";
            }
        }
    }
    if (failed) {
        throw TerminalError(TerminalErrorKind::kIoError,
                            "script finished with errors");
    }
}

void run_command(CliContext& ctx, const std::vector<std::string>& args) {
    const std::string& name = args[0];
    if (name == "readers") {
        cmd_readers(ctx);
    } else if (name == "atr") {
        cmd_atr(ctx);
    } else if (name == "open") {
        cmd_open(ctx, args);
    } else if (name == "transmit") {
        cmd_transmit(ctx, args);
    } else if (name == "close") {
        cmd_close(ctx, args);
    } else if (name == "sim-state") {
        cmd_sim_state(ctx, args);
    } else if (name == "script") {
        cmd_script(ctx, args);
    } else {
        throw UsageError("unknown command '" + name + "'");
    }
}

int dispatch(CliContext& ctx, const std::vector<std::string>& args) {
    try {
        run_command(ctx, args);
        return kExitOk;
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsageError;
    } catch (const TerminalError& err) {
        std::cerr << to_string(err.kind()) << ": " << err.what() << "\n";
        return kExitCommandError;
    } catch (const TransportError& err) {
        std::cerr << to_string(err.kind()) << ": " << err.what() << "\n";
        return kExitCommandError;
    } catch (const ApduError& err) {
        std::cerr << "MalformedApdu: " << err.what() << "\n";
        return kExitCommandError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitCommandError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open Mobile API stack over a simulated UICC"};
    app.allow_extras();

    std::string profile_path;
    std::string client_cert;
    bool trace = false;
    bool legacy = false;
    bool closed_world = false;
    app.add_option("--profile", profile_path,
                   "card profile JSON (default: $OMAPI_PROFILE)");
    app.add_option("--client-cert", client_cert,
                   "client certificate hash, hex");
    app.add_flag("--trace", trace, "echo OEM hook frames");
    app.add_flag("--legacy", legacy,
                 "baseband omits the select response; use GET RESPONSE");
    app.add_flag("--closed-world", closed_world,
                 "deny access when the card has no rule applet");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& err) {
        std::cerr << "error: " << err.get_name() << "\n";
        return kExitUsageError;
    }

    std::vector<std::string> args = app.remaining();
    if (args.empty()) {
        std::cerr << "error: no command given (try --help)\n";
        return kExitUsageError;
    }

    if (profile_path.empty()) {
        if (const char* env = std::getenv("OMAPI_PROFILE")) {
            profile_path = env;
        }
    }
    if (profile_path.empty()) {
        std::cerr << "error: no card profile (--profile or $OMAPI_PROFILE)\n";
        return kExitUsageError;
    }

    ClientIdentity client;
    if (!client_cert.empty()) {
        if (!omapi::is_valid_hex(client_cert)) {
            std::cerr << "error: --client-cert is not valid hex\n";
            return kExitUsageError;
        }
        client.cert_hash = omapi::hex_to_bytes(std::string_view(client_cert));
    }

    try {
        CardProfile profile = CardProfile::load(profile_path);
        CliContext ctx(std::move(profile), std::move(client), trace, legacy,
                       std::cout);
        ctx.service().set_closed_world(closed_world);
        return dispatch(ctx, args);
    } catch (const omapi::ProfileError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsageError;
    }
}
