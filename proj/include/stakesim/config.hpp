// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef STAKESIM_CONFIG_HPP
#define STAKESIM_CONFIG_HPP

#include <stakesim/engine.hpp>

#include <stdexcept>
#include <string>

namespace stakesim {

/** A rejected configuration; what() reads "origin:line:column: message". */
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& origin, int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/**
 * YAML run configuration. Every key is optional and defaults to the matching
 * SimConfig member, except participants. Unknown keys are errors.
 */
SimConfig parse_config(const std::string& text, const std::string& origin = "<config>");
SimConfig load_config(const std::string& path);

} // namespace stakesim

#endif // STAKESIM_CONFIG_HPP
