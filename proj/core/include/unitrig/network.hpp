#pragma once

// Block-level composition: sources, triggers, thresholding elements, and
// probes wired through current-summing nets. The block graph is a DAG; the
// only feedback allowed is the one inside SCHMITT / INV_SCHMITT blocks.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "unitrig/schmitt.hpp"
#include "unitrig/stimulus.hpp"

namespace unitrig {

enum class BlockKind : std::uint8_t { Source, Schmitt, InvSchmitt, Heaviside, Probe };

std::string to_string(BlockKind kind);

struct SourceSpec {
    Stimulus stimulus = Stimulus::constant(0.0);
};

struct TriggerSpec {
    SchmittParams params{};
    Calibration cal{};
    DynamicsConfig dyn{};
    bool inverted = false;
};

struct HeavisideSpec {
    PicoAmp threshold = 0.0;
    PicoAmp gain = 0.0;
};

struct ProbeSpec {};

struct Block {
    std::string id;
    std::variant<SourceSpec, TriggerSpec, HeavisideSpec, ProbeSpec> spec;

    BlockKind kind() const;

    static Block source(std::string id, Stimulus stimulus);
    static Block schmitt(std::string id, SchmittParams params, Calibration cal = {},
                         DynamicsConfig dyn = {});
    static Block inv_schmitt(std::string id, SchmittParams params, Calibration cal = {},
                             DynamicsConfig dyn = {});
    static Block heaviside(std::string id, PicoAmp threshold, PicoAmp gain);
    static Block probe(std::string id);
};

/// One net: the outputs of all drivers sum into the sink's input (KCL on a
/// current-mode wire). Several nets may target the same sink; their driver
/// lists concatenate.
struct Net {
    std::vector<std::string> drivers;
    std::string sink;
};

/// Construction failure; carries every issue found, not just the first.
class NetworkBuildError : public std::runtime_error {
public:
    explicit NetworkBuildError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Per-run mutable state: one SchmittState per trigger block.
struct NetworkState {
    std::vector<SchmittState> triggers;
};

class Network {
public:
    /// Validates blocks and nets and returns an immutable network with a
    /// fixed topological evaluation order. Throws NetworkBuildError listing
    /// every duplicate id, dangling reference, undriven input, invalid
    /// parameter set, and cycle.
    static Network build(std::vector<Block> blocks, std::vector<Net> nets);

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<std::size_t>& topo_order() const { return topo_order_; }

    std::size_t size() const { return blocks_.size(); }
    const Block& block(std::size_t index) const { return blocks_[index]; }
    std::optional<std::size_t> index_of(const std::string& id) const;

    /// Driver block indices feeding each block's input (empty for sources).
    const std::vector<std::size_t>& inputs_of(std::size_t index) const {
        return inputs_[index];
    }

    const std::vector<std::size_t>& source_indices() const { return sources_; }
    const std::vector<std::size_t>& probe_indices() const { return probes_; }
    const std::vector<std::size_t>& trigger_indices() const { return triggers_; }

    /// Slot of a trigger block inside NetworkState::triggers.
    std::size_t trigger_slot(std::size_t block_index) const;

    const TriggerModel& trigger_model(std::size_t slot) const { return models_[slot]; }

    NetworkState initial_state() const;

    std::vector<std::string> probe_ids() const;
    std::vector<std::string> source_ids() const;

private:
    Network() = default;

    std::vector<Block> blocks_;
    std::vector<std::vector<std::size_t>> inputs_;
    std::vector<std::size_t> topo_order_;
    std::vector<std::size_t> sources_;
    std::vector<std::size_t> probes_;
    std::vector<std::size_t> triggers_;
    std::vector<std::size_t> trigger_slot_;  // size() entries, npos for non-triggers
    std::vector<TriggerModel> models_;
    std::map<std::string, std::size_t> index_by_id_;
};

}  // namespace unitrig
