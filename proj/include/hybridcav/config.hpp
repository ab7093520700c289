#pragma once

#include "hybridcav/model.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hybridcav {

/// Bad configuration input; line is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string field, std::size_t line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}
    [[nodiscard]] const std::string& field() const { return field_; }
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

struct RunConfig {
    SystemParams params;
    DriveConfig drive;
    Regime regime = Regime::LowExcitation;
    bool tie_delta = false;
    std::optional<PresetName> preset;
    std::vector<std::string> assumptions;
};

[[nodiscard]] RunConfig config_from_preset(PresetName name);

/// Angles in radians or as multiples of pi: "pi", "0.5pi", "-pi/4", "2*pi", "1.3".
[[nodiscard]] double parse_angle(std::string_view text);

/// Strict decimal parse; the whole string must be consumed.
[[nodiscard]] double parse_number(std::string_view text, std::string_view field, std::size_t line = 0);

/// Applies one key=value setting in place. Setting g2n rescales the atom number
/// at fixed g. While tie_delta is on, changes to g2n, g, n_atoms or kappa move
/// delta to tied_delta(); switching it on leaves delta untouched.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line = 0);

/// Applies a "key=value" override string.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Flat key = value text; '#' starts a comment. A "preset" key must come first.
[[nodiscard]] RunConfig parse_config(std::string_view text, RunConfig base = {});

/// Throws ConfigError naming the first violated invariant.
void require_valid(const RunConfig& cfg);

/// Keys accepted by apply_setting().
[[nodiscard]] const std::vector<std::string>& config_keys();

/// Resolved settings as parseable key = value text.
[[nodiscard]] std::string dump_config(const RunConfig& cfg);

/// Formats a double with 17 significant digits.
[[nodiscard]] std::string format_double(double v);

}  // namespace hybridcav
