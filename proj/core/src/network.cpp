#include "unitrig/network.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace unitrig {

namespace {
constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
}

std::string to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::Source: return "source";
        case BlockKind::Schmitt: return "schmitt";
        case BlockKind::InvSchmitt: return "inv_schmitt";
        case BlockKind::Heaviside: return "heaviside";
        case BlockKind::Probe: return "probe";
    }
    return "?";
}

BlockKind Block::kind() const {
    if (std::holds_alternative<SourceSpec>(spec)) {
        return BlockKind::Source;
    }
    if (const TriggerSpec* t = std::get_if<TriggerSpec>(&spec)) {
        return t->inverted ? BlockKind::InvSchmitt : BlockKind::Schmitt;
    }
    if (std::holds_alternative<HeavisideSpec>(spec)) {
        return BlockKind::Heaviside;
    }
    return BlockKind::Probe;
}

Block Block::source(std::string id, Stimulus stimulus) {
    return {std::move(id), SourceSpec{std::move(stimulus)}};
}

Block Block::schmitt(std::string id, SchmittParams params, Calibration cal, DynamicsConfig dyn) {
    return {std::move(id), TriggerSpec{params, cal, dyn, false}};
}

Block Block::inv_schmitt(std::string id, SchmittParams params, Calibration cal,
                         DynamicsConfig dyn) {
    return {std::move(id), TriggerSpec{params, cal, dyn, true}};
}

Block Block::heaviside(std::string id, PicoAmp threshold, PicoAmp gain) {
    return {std::move(id), HeavisideSpec{threshold, gain}};
}

Block Block::probe(std::string id) {
    return {std::move(id), ProbeSpec{}};
}

NetworkBuildError::NetworkBuildError(std::vector<std::string> issues)
    : std::runtime_error([&issues] {
          std::ostringstream msg;
          msg << "network build failed (" << issues.size() << " issue"
              << (issues.size() == 1 ? "" : "s") << "):";
          for (const std::string& issue : issues) {
              msg << "\n  - " << issue;
          }
          return msg.str();
      }()),
      issues_(std::move(issues)) {}

Network Network::build(std::vector<Block> blocks, std::vector<Net> nets) {
    std::vector<std::string> issues;

    std::map<std::string, std::size_t> index_by_id;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string& id = blocks[i].id;
        if (id.empty()) {
            issues.push_back("block #" + std::to_string(i) + " has an empty id");
            continue;
        }
        if (!index_by_id.emplace(id, i).second) {
            issues.push_back("duplicate block id \"" + id + "\"");
        }
    }

    // Parameter validity, collected per block so one bad trigger does not
    // hide another.
    for (const Block& b : blocks) {
        if (const TriggerSpec* t = std::get_if<TriggerSpec>(&b.spec)) {
            try {
                validate(t->params, "block \"" + b.id + "\"");
                validate(t->dyn, "block \"" + b.id + "\"");
                schmitt_thresholds(t->params, t->cal, t->dyn);
            } catch (const ConfigError& e) {
                issues.push_back(e.what());
            }
        } else if (const HeavisideSpec* h = std::get_if<HeavisideSpec>(&b.spec)) {
            if (!(h->threshold > 0.0) || !(h->gain > 0.0)) {
                issues.push_back("block \"" + b.id +
                                 "\": heaviside threshold and gain must be positive");
            }
        }
    }

    std::vector<std::vector<std::size_t>> inputs(blocks.size());
    for (const Net& net : nets) {
        const auto sink_it = index_by_id.find(net.sink);
        if (sink_it == index_by_id.end()) {
            issues.push_back("net references missing sink \"" + net.sink + "\"");
            continue;
        }
        const std::size_t sink = sink_it->second;
        if (blocks[sink].kind() == BlockKind::Source) {
            issues.push_back("net drives source \"" + net.sink + "\"; sources have no input");
            continue;
        }
        for (const std::string& driver_id : net.drivers) {
            const auto driver_it = index_by_id.find(driver_id);
            if (driver_it == index_by_id.end()) {
                issues.push_back("net references missing driver \"" + driver_id + "\"");
                continue;
            }
            const std::size_t driver = driver_it->second;
            if (blocks[driver].kind() == BlockKind::Probe) {
                issues.push_back("probe \"" + driver_id + "\" cannot drive a net");
                continue;
            }
            inputs[sink].push_back(driver);
        }
    }

    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].kind() != BlockKind::Source && inputs[i].empty()) {
            issues.push_back("block \"" + blocks[i].id + "\" (" + to_string(blocks[i].kind()) +
                             ") has no driver");
        }
    }

    // Kahn's algorithm; anything left over sits on a cycle.
    std::vector<std::size_t> indegree(blocks.size(), 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        indegree[i] = inputs[i].size();
    }
    std::vector<std::vector<std::size_t>> outputs(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t driver : inputs[i]) {
            outputs[driver].push_back(i);
        }
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (indegree[i] == 0) {
            ready.push_back(i);
        }
    }
    std::vector<std::size_t> topo;
    topo.reserve(blocks.size());
    while (!ready.empty()) {
        const std::size_t i = ready.front();
        ready.pop_front();
        topo.push_back(i);
        for (std::size_t next : outputs[i]) {
            if (--indegree[next] == 0) {
                ready.push_back(next);
            }
        }
    }
    if (topo.size() != blocks.size()) {
        std::vector<std::string> cyclic;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (indegree[i] > 0) {
                cyclic.push_back(blocks[i].id);
            }
        }
        std::ostringstream msg;
        msg << "cycle detected through block(s):";
        for (const std::string& id : cyclic) {
            msg << " \"" << id << "\"";
        }
        issues.push_back(msg.str());
    }

    if (!issues.empty()) {
        throw NetworkBuildError(std::move(issues));
    }

    Network net;
    net.blocks_ = std::move(blocks);
    net.inputs_ = std::move(inputs);
    net.topo_order_ = std::move(topo);
    net.index_by_id_ = std::move(index_by_id);
    net.trigger_slot_.assign(net.blocks_.size(), kNoSlot);
    for (std::size_t i = 0; i < net.blocks_.size(); ++i) {
        switch (net.blocks_[i].kind()) {
            case BlockKind::Source:
                net.sources_.push_back(i);
                break;
            case BlockKind::Probe:
                net.probes_.push_back(i);
                break;
            case BlockKind::Schmitt:
            case BlockKind::InvSchmitt: {
                const TriggerSpec& t = std::get<TriggerSpec>(net.blocks_[i].spec);
                net.trigger_slot_[i] = net.triggers_.size();
                net.triggers_.push_back(i);
                net.models_.emplace_back(t.params, t.cal, t.dyn, t.inverted);
                break;
            }
            case BlockKind::Heaviside:
                break;
        }
    }
    return net;
}

std::optional<std::size_t> Network::index_of(const std::string& id) const {
    const auto it = index_by_id_.find(id);
    if (it == index_by_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t Network::trigger_slot(std::size_t block_index) const {
    return trigger_slot_[block_index];
}

NetworkState Network::initial_state() const {
    NetworkState state;
    state.triggers.assign(triggers_.size(), SchmittState{});
    return state;
}

std::vector<std::string> Network::probe_ids() const {
    std::vector<std::string> ids;
    ids.reserve(probes_.size());
    for (std::size_t i : probes_) {
        ids.push_back(blocks_[i].id);
    }
    return ids;
}

std::vector<std::string> Network::source_ids() const {
    std::vector<std::string> ids;
    ids.reserve(sources_.size());
    for (std::size_t i : sources_) {
        ids.push_back(blocks_[i].id);
    }
    return ids;
}

}  // namespace unitrig
