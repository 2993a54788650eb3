// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/config.hpp>

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace stakesim {

ConfigError::ConfigError(const std::string& origin, int line, int column, const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column)
{
}

namespace {

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const
    {
        const YAML::Mark m = at.Mark();
        throw ConfigError(origin_, m.line + 1, m.column + 1, message);
    }

    void expect_map(const YAML::Node& node, const std::string& what, const std::set<std::string>& keys) const
    {
        if (!node.IsMap()) fail(node, what + " must be a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!keys.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
        }
    }

    template <typename T>
    void get(const YAML::Node& parent, const char* key, T& out) const
    {
        const YAML::Node n = parent[key];
        if (!n) return;
        if (!n.IsScalar()) fail(n, std::string("'") + key + "' must be a scalar");
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, std::string("'") + key + "' has an invalid value '" + n.Scalar() + "'");
        }
    }

    void get_count(const YAML::Node& parent, const char* key, std::uint32_t& out) const
    {
        std::int64_t v = out;
        get(parent, key, v);
        if (v < 0 || v > UINT32_MAX) fail(parent[key], std::string("'") + key + "' is out of range");
        out = static_cast<std::uint32_t>(v);
    }

    void get_slot(const YAML::Node& parent, const char* key, std::uint64_t& out) const
    {
        std::int64_t v = static_cast<std::int64_t>(out);
        get(parent, key, v);
        if (v < 0) fail(parent[key], std::string("'") + key + "' must not be negative");
        out = static_cast<std::uint64_t>(v);
    }

    // Range checks are repeated from SimConfig::validate so the message carries a line.
    void check(bool ok, const YAML::Node& at, const std::string& message) const
    {
        if (!ok) fail(at, message);
    }

    StrategyConfig strategy(const YAML::Node& node) const
    {
        StrategyConfig s;
        if (node.IsScalar()) {
            s.kind = node.as<std::string>();
            return s;
        }
        expect_map(node, "strategy", {"kind", "depth", "horizon", "k_max", "node_budget", "trigger", "confirm_depth",
                                      "start_slot", "vendor", "track_slots", "root"});
        get(node, "kind", s.kind);
        get_count(node, "depth", s.depth);
        get_slot(node, "horizon", s.limits.horizon);
        get_count(node, "k_max", s.limits.k_max);
        std::uint64_t budget = s.limits.node_budget;
        get_slot(node, "node_budget", budget);
        s.limits.node_budget = budget;
        get(node, "trigger", s.trigger);
        get_count(node, "confirm_depth", s.confirm_depth);
        get_slot(node, "start_slot", s.start_slot);
        get(node, "vendor", s.vendor);
        get_slot(node, "track_slots", s.track_slots);
        get(node, "root", s.root);
        return s;
    }

    ParticipantConfig participant(const YAML::Node& node) const
    {
        expect_map(node, "participant", {"name", "coins", "count", "strategy", "fork_choice"});
        ParticipantConfig p;
        if (!node["name"]) fail(node, "participant requires a name");
        get(node, "name", p.name);
        get_count(node, "coins", p.coins);
        get_count(node, "count", p.count);
        check(p.count >= 1, node["count"] ? node["count"] : node, "'count' must be at least 1");
        if (node["strategy"]) p.strategy = strategy(node["strategy"]);
        std::string fc = "longest-chain";
        get(node, "fork_choice", fc);
        if (fc == "ghost") {
            p.fork_choice = ForkChoice::Ghost;
        } else if (fc != "longest-chain") {
            fail(node["fork_choice"], "fork_choice must be longest-chain or ghost");
        }
        return p;
    }

    SimConfig config(const YAML::Node& root) const
    {
        if (!root || root.IsNull()) throw ConfigError(origin_, 1, 1, "empty configuration");
        expect_map(root, "configuration",
                   {"protocol", "participants", "slots", "seed", "detector", "stop_when_finished", "record_slots"});
        SimConfig c;
        if (const YAML::Node p = root["protocol"]) {
            expect_map(p, "protocol", {"name", "p", "ell", "freeze"});
            get(p, "name", c.protocol.name);
            get(p, "p", c.protocol.p);
            get_count(p, "ell", c.protocol.ell);
            get_count(p, "freeze", c.protocol.freeze);
            check(c.protocol.p > 0.0 && c.protocol.p < 1.0, p["p"] ? p["p"] : p, "protocol.p must lie in (0, 1)");
        }
        get_slot(root, "slots", c.slots);
        get(root, "seed", c.seed);
        get(root, "detector", c.detector);
        get(root, "stop_when_finished", c.stop_when_finished);
        get(root, "record_slots", c.record_slots);
        const YAML::Node ps = root["participants"];
        if (!ps) fail(root, "participants are required");
        if (!ps.IsSequence() || ps.size() == 0) fail(ps, "participants must be a non-empty list");
        for (const auto& p : ps) c.participants.push_back(participant(p));
        try {
            c.validate();
        } catch (const DomainError& e) {
            fail(ps, e.what());
        }
        return c;
    }

private:
    std::string origin_;
};

} // namespace

SimConfig parse_config(const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(origin, e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    return Reader(origin).config(root);
}

SimConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, 0, 0, "cannot read configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

} // namespace stakesim
