#include "sprocket/config.hpp"

#include <charconv>
#include <string>

namespace sprocket {

const char* window_rule_kind_name(WindowRule::Kind kind) {
    switch (kind) {
        case WindowRule::Kind::SqrtLength: return "sqrt";
        case WindowRule::Kind::None:       return "none";
        case WindowRule::Kind::Fixed:      return "fixed";
    }
    return "?";
}

WindowRule parse_window_rule(std::string_view text) {
    WindowRule rule;
    if (text == "sqrt") {
        rule.kind = WindowRule::Kind::SqrtLength;
        return rule;
    }
    if (text == "none") {
        rule.kind = WindowRule::Kind::None;
        return rule;
    }
    if (text.starts_with("fixed:")) {
        rule.kind = WindowRule::Kind::Fixed;
        const std::string_view num = text.substr(6);
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
        if (ec != std::errc() || ptr != num.data() + num.size())
            fail(ErrorCode::ParseError, "bad fixed window '" + std::string(text) + "'");
        rule.fixed = value;
        return rule;
    }
    fail(ErrorCode::ParseError, "unknown window rule '" + std::string(text) + "'");
}

std::string window_rule_text(const WindowRule& rule) {
    if (rule.kind == WindowRule::Kind::Fixed)
        return "fixed:" + std::to_string(rule.fixed);
    return window_rule_kind_name(rule.kind);
}

const char* selection_kind_name(SelectionKind kind) {
    switch (kind) {
        case SelectionKind::UniformRandom: return "random";
        case SelectionKind::Stratified:    return "stratified";
        case SelectionKind::KmeansppInit:  return "kmeanspp";
    }
    return "?";
}

SelectionKind selection_kind_from_name(std::string_view name) {
    if (name == "random" || name == "uniform") return SelectionKind::UniformRandom;
    if (name == "stratified") return SelectionKind::Stratified;
    if (name == "kmeanspp") return SelectionKind::KmeansppInit;
    fail(ErrorCode::ParseError, "unknown selection strategy '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    if (kernel_count < 1) fail(ErrorCode::InvalidArgument, "kernel_count must be positive");
    if (!(prototype_log_base > 1.0))
        fail(ErrorCode::InvalidArgument, "prototype_log_base must exceed 1");
    if (thread_count < 1) fail(ErrorCode::InvalidArgument, "thread_count must be positive");
    if (!distance_spec.empty()) {
        std::size_t total = 0;
        for (const auto& block : distance_spec) {
            if (block.share < 1)
                fail(ErrorCode::InvalidArgument, "every distance share must be >= 1");
            total += block.share;
        }
        if (total != kernel_count)
            fail(ErrorCode::InvalidArgument,
                 "distance shares sum to " + std::to_string(total) + ", expected " +
                     std::to_string(kernel_count));
    }
}

std::vector<DistanceShare> RunConfig::resolved_spec() const {
    validate();
    if (!distance_spec.empty()) return distance_spec;
    DistanceShare all;
    all.measure.kind = DistanceKind::Msm;
    all.share = kernel_count;
    return {all};
}

}  // namespace sprocket
