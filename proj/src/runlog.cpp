// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/analysis.hpp>
#include <stakesim/engine.hpp>

#include <iomanip>
#include <sstream>

namespace stakesim {

namespace {

nlohmann::json evidence_json(const DeviationEvidence& e)
{
    return {{"coin", e.coin}, {"first", e.first.hex()}, {"second", e.second.hex()}, {"kind", to_string(e.kind)}};
}

nlohmann::json transfer_json(const Transfer& tx) { return {{"coin", tx.coin}, {"from", tx.from}, {"to", tx.to}}; }

nlohmann::json announcement_json(const Announcement& a)
{
    nlohmann::json payload = nlohmann::json::array();
    for (const auto& tx : a.block.payload) payload.push_back(transfer_json(tx));
    return {{"id", a.block.id.hex()},
            {"pred", a.block.pred->hex()},
            {"by", a.by},
            {"coin", *a.block.witness},
            {"t_b", a.block.time},
            {"at", a.at},
            {"payload", payload}};
}

} // namespace

std::string runlog_jsonl(const RunLog& log)
{
    std::string out;
    out += nlohmann::json{{"schema", kRunLogSchema}, {"type", "header"}, {"config", log.config}}.dump();
    out += '\n';
    for (const auto& r : log.records) {
        nlohmann::json ann = nlohmann::json::array();
        for (const auto& a : r.announcements) ann.push_back(announcement_json(a));
        nlohmann::json txs = nlohmann::json::array();
        for (const auto& tx : r.txs) txs.push_back(transfer_json(tx));
        nlohmann::json dev = nlohmann::json::array();
        for (const auto& e : r.deviations) dev.push_back(evidence_json(e));
        nlohmann::json line = {{"schema", kRunLogSchema},
                               {"type", "slot"},
                               {"slot", r.slot},
                               {"announcements", ann},
                               {"txs", txs},
                               {"best", r.best.hex()},
                               {"score", r.score},
                               {"deviations", dev}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

nlohmann::json summary_json(const RunLog& log)
{
    const Metrics m = metrics(log);
    nlohmann::json ps = nlohmann::json::array();
    for (std::size_t i = 0; i < log.tallies.size(); ++i) {
        const auto& t = log.tallies[i];
        ps.push_back({{"id", t.id},
                      {"name", t.name},
                      {"kind", t.kind},
                      {"coins", t.coins},
                      {"stake", t.stake},
                      {"announced", t.announced},
                      {"on_best_chain", t.on_best_chain},
                      {"share", m.share[i]},
                      {"rate_per_coin", m.rate_per_coin[i]},
                      {"rate_vs_honest", m.rate_vs_honest[i]},
                      {"report", t.report}});
    }
    nlohmann::json dev = nlohmann::json::array();
    for (const auto& e : log.deviations) dev.push_back(evidence_json(e));
    nlohmann::json s = {{"schema", kSummarySchema},
                        {"config", log.config},
                        {"slots_run", log.slots_run},
                        {"blocks", log.blocks},
                        {"final_best", log.final_best.hex()},
                        {"final_score", log.final_score},
                        {"max_reorg_depth", m.max_reorg_depth},
                        {"honest_rate_per_coin", m.honest_rate_per_coin},
                        {"participants", ps},
                        {"deviations", dev},
                        {"double_spend", {{"attempts", m.double_spend_attempts}, {"successes", m.double_spend_successes}}}};
    if (!m.ghost_subtree.empty()) {
        s["ghost"] = {{"subtree_size", m.ghost_subtree}, {"own_blocks", m.ghost_own}, {"captured", m.ghost_captured}};
    }
    return s;
}

std::string summary_text(const RunLog& log)
{
    const Metrics m = metrics(log);
    std::ostringstream os;
    os << std::setprecision(6);
    os << "slots " << log.slots_run << ", blocks " << log.blocks << ", best chain length " << log.final_score
       << ", max reorg depth " << m.max_reorg_depth << ", deviations " << log.deviations.size() << "\n";
    os << std::left << std::setw(20) << "participant" << std::setw(18) << "strategy" << std::setw(8) << "coins"
       << std::setw(12) << "stake" << std::setw(12) << "share" << std::setw(12) << "announced"
       << "rate/honest\n";
    for (std::size_t i = 0; i < log.tallies.size(); ++i) {
        const auto& t = log.tallies[i];
        os << std::left << std::setw(20) << t.name << std::setw(18) << t.kind << std::setw(8) << t.coins
           << std::setw(12) << t.stake << std::setw(12) << m.share[i] << std::setw(12) << t.announced
           << m.rate_vs_honest[i] << "\n";
    }
    const std::uint64_t lambda = [&] {
        std::uint64_t n = 0;
        for (const auto& t : log.tallies) n += t.coins;
        return n;
    }();
    for (std::size_t i = 0; i < log.tallies.size(); ++i) {
        const auto& t = log.tallies[i];
        if (t.kind != "unas") continue;
        const auto depth = t.report.at("depth").get<std::uint32_t>();
        const auto bound = analysis::unas_rate_bound(depth, lambda);
        os << t.name << ": announce rate " << m.rate_vs_honest[i] << "x honest; bound 2-2D/(lambda+1) = "
           << bound.multiplier << " (D=" << depth << ", lambda=" << lambda << ")\n";
    }
    if (m.double_spend_attempts) {
        os << "double-spend: " << m.double_spend_successes << " of " << m.double_spend_attempts << " succeeded\n";
    }
    if (!m.ghost_subtree.empty()) {
        os << "exponential fork: subtree size after " << (m.ghost_subtree.size() - 1) << " slots "
           << m.ghost_subtree.back() << ", GHOST head captured " << (m.ghost_captured.back() ? "yes" : "no") << "\n";
    }
    return os.str();
}

} // namespace stakesim
