#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/plastic_net.hpp"
#include "hebbnet/topology.hpp"

namespace hebbnet {

// What the flat search vector encodes: per-connection plasticity rules
// (optionally together with the initial weights), or plain fixed weights for
// the non-plastic baseline trained by the same optimizer.
struct GenomeMode {
    enum class Kind { hebbian, static_weights };

    Kind kind = Kind::hebbian;
    PlasticityVariant variant = PlasticityVariant::ABCD_plus_eta;  // hebbian only
    bool coevolve_init = false;                                    // hebbian only

    static GenomeMode hebbian(PlasticityVariant v = PlasticityVariant::ABCD_plus_eta,
                              bool coevolve = false) {
        return GenomeMode{Kind::hebbian, v, coevolve};
    }
    static GenomeMode static_weights() {
        return GenomeMode{Kind::static_weights, PlasticityVariant::ABCD_plus_eta, false};
    }

    bool operator==(const GenomeMode&) const = default;
};

std::string to_string(const GenomeMode& mode);

struct GenomeSegment {
    std::string name;  // conv_static | plasticity | init_weights | direct_weights
    int offset = 0;
    int length = 0;

    bool operator==(const GenomeSegment&) const = default;
};

// Frozen segment order: [conv_static, plasticity, init_weights] for hebbian
// genomes, [direct_weights] (conv + fc in one block) for static ones.
// Within the plasticity segment, active coefficient classes are laid out
// class-major in canonical order (A, B, C, D, eta), each class row-major
// per layer.
struct GenomeLayout {
    GenomeMode mode;
    std::uint64_t topology_hash = 0;
    std::vector<GenomeSegment> segments;
    int total_len = 0;

    const GenomeSegment* find(const std::string& name) const;
    bool operator==(const GenomeLayout&) const = default;
};

GenomeLayout layout_for(const NetworkTopology& topology, const GenomeMode& mode);

struct Genome {
    Eigen::VectorXd values;
    GenomeLayout layout;
    std::uint64_t seed = 0;   // seed lineage of init_genome / run master seed
    int generation = 0;

    bool all_finite() const { return values.allFinite(); }
};

// The structured view of one genome. For hebbian genomes: coefficient
// tensors, static conv params, and (when co-evolved) initial fc weights.
// For static genomes: conv params plus fixed fc weights.
struct DecodedGenome {
    GenomeMode mode;
    std::optional<HebbianCoefficients> coeffs;
    std::vector<double> conv_params;
    std::optional<WeightState> init_weights;     // hebbian + coevolve_init
    std::optional<WeightState> direct_weights;   // static mode
};

DecodedGenome decode(const Genome& genome, const NetworkTopology& topology);
// Exact inverse of decode for matching layout/topology.
Genome encode(const DecodedGenome& decoded, const NetworkTopology& topology);

// Plasticity entries ~ U(-1,1); conv/direct/initial-weight entries
// ~ U(-0.1,0.1). Deterministic per seed.
Genome init_genome(const GenomeLayout& layout, std::uint64_t seed);

// Binary checkpoint: version tag, mode, topology hash, layout, payload,
// generation. Loading rejects version or topology mismatches.
void save_genome(const std::string& path, const Genome& genome);
Genome load_genome(const std::string& path, const NetworkTopology& expected_topology);

}  // namespace hebbnet
