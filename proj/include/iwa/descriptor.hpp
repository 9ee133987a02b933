#pragma once

#include <string>

#include "iwa/parity.hpp"

namespace iwa {

/// Parsed descriptor: one ring context shared by every payload.
struct Descriptor {
    RingContext ring;
    std::vector<ModuleInput> modules;
    std::vector<ElementaryModule2> modules2;  // two-variable elementary modules

    struct SesquiPayload {
        uint32_t left = 0, right = 0;
        SesquiForm form;
    };
    struct FinitePayload {
        FiniteForm form;
    };
    std::vector<SesquiPayload> sesqui_forms;
    std::vector<FinitePayload> finite_forms;

    struct SystemPayload {
        ProjectiveSystem system;
        std::vector<FiniteForm> forms;  // empty or one per level
        uint32_t kernel_bound = 0;
    };
    std::vector<SystemPayload> systems;
};

Descriptor parse_descriptor(const std::string& json_text);

struct RunOptions {
    std::optional<uint32_t> precision;
    std::optional<uint32_t> truncation;
    uint32_t levels = 3;
    uint64_t seed = 20260808;
    std::string format = "text";  // "text" or "summary"
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 verification failed, 2 input error
    std::string text;
    std::string summary;

    std::string rendered(const std::string& format) const {
        return format == "summary" ? summary : text + summary;
    }
};

// Commands: prepare, coinv, adjoint, pair, funceq, parity.  (The acceptance
// suite is driven separately.)
RunResult run_command(const std::string& command, const std::string& descriptor_json,
                      const RunOptions& opts);

}  // namespace iwa
