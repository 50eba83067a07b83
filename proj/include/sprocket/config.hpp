#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sprocket/distances.hpp"

namespace sprocket {

// How the Sakoe-Chiba half-width is derived from the original series length.
struct WindowRule {
    enum class Kind { SqrtLength, None, Fixed };
    Kind kind = Kind::SqrtLength;
    std::uint32_t fixed = 0;
};

const char* window_rule_kind_name(WindowRule::Kind kind);
WindowRule parse_window_rule(std::string_view text);  // "sqrt" | "none" | "fixed:N"
std::string window_rule_text(const WindowRule& rule);

enum class SelectionKind { UniformRandom, Stratified, KmeansppInit };

const char* selection_kind_name(SelectionKind kind);
SelectionKind selection_kind_from_name(std::string_view name);

// A block of kernels sharing one distance measure. Windows on the measure are
// left unset here; they are resolved against the dataset length at fit time.
struct DistanceShare {
    DistanceMeasure measure;
    std::size_t share = 0;
};

struct RunConfig {
    std::size_t kernel_count = 512;
    double prototype_log_base = 4.0;
    WindowRule window_rule{};
    std::vector<DistanceShare> distance_spec;  // empty = every kernel on default msm
    SelectionKind selection = SelectionKind::UniformRandom;
    std::uint64_t seed = 0;
    unsigned thread_count = 1;
    bool normalize_input = false;
    bool normalize_activations = false;

    void validate() const;

    // distance_spec with the default filled in; shares validated to sum to
    // kernel_count with every share >= 1.
    std::vector<DistanceShare> resolved_spec() const;
};

}  // namespace sprocket
