#include "hebbnet/genome.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hebbnet/io.hpp"
#include "hebbnet/rng.hpp"

namespace hebbnet {

namespace {

constexpr std::uint32_t kGenomeMagic = 0x6e656268;  // "hebn"
constexpr std::uint32_t kGenomeVersion = 1;

std::vector<Eigen::MatrixXd>* class_tensor(HebbianCoefficients& c, const std::string& name) {
    if (name == "A") return &c.A;
    if (name == "B") return &c.B;
    if (name == "C") return &c.C;
    if (name == "D") return &c.D;
    if (name == "eta") return &c.eta;
    return nullptr;
}

}  // namespace

std::string to_string(const GenomeMode& mode) {
    if (mode.kind == GenomeMode::Kind::static_weights) return "static_weights";
    std::string s = "hebbian/" + to_string(mode.variant);
    if (mode.coevolve_init) s += "+init";
    return s;
}

const GenomeSegment* GenomeLayout::find(const std::string& name) const {
    for (const auto& s : segments) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

GenomeLayout layout_for(const NetworkTopology& topology, const GenomeMode& mode) {
    topology.validate();
    GenomeLayout layout;
    layout.mode = mode;
    layout.topology_hash = topology.hash();

    int at = 0;
    const auto push = [&](const std::string& name, int len) {
        if (len <= 0) return;
        layout.segments.push_back({name, at, len});
        at += len;
    };

    if (mode.kind == GenomeMode::Kind::static_weights) {
        push("direct_weights", topology.conv_param_count() + topology.fc_synapse_count());
    } else {
        push("conv_static", topology.conv_param_count());
        push("plasticity", coeffs_per_synapse(mode.variant) * topology.fc_synapse_count());
        if (mode.coevolve_init) push("init_weights", topology.fc_synapse_count());
    }
    layout.total_len = at;
    return layout;
}

DecodedGenome decode(const Genome& genome, const NetworkTopology& topology) {
    const GenomeLayout expected = layout_for(topology, genome.layout.mode);
    if (genome.layout != expected) {
        throw std::invalid_argument("genome layout does not match topology/mode");
    }
    if (genome.values.size() != genome.layout.total_len) {
        throw std::invalid_argument("genome length " + std::to_string(genome.values.size()) +
                                    " does not match layout total " +
                                    std::to_string(genome.layout.total_len));
    }

    DecodedGenome out;
    out.mode = genome.layout.mode;

    if (out.mode.kind == GenomeMode::Kind::static_weights) {
        const auto* seg = genome.layout.find("direct_weights");
        const int conv_len = topology.conv_param_count();
        out.conv_params.assign(genome.values.data() + seg->offset,
                               genome.values.data() + seg->offset + conv_len);
        out.direct_weights = WeightState::from_flat(
            topology, genome.values.segment(seg->offset + conv_len, seg->length - conv_len));
        return out;
    }

    if (const auto* seg = genome.layout.find("conv_static")) {
        out.conv_params.assign(genome.values.data() + seg->offset,
                               genome.values.data() + seg->offset + seg->length);
    }

    const auto* pl = genome.layout.find("plasticity");
    auto coeffs = HebbianCoefficients::zeros(topology, out.mode.variant);
    int at = pl->offset;
    for (const std::string& cls : active_coefficient_classes(out.mode.variant)) {
        auto* tensor = class_tensor(coeffs, cls);
        for (auto& m : *tensor) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    m(i, j) = genome.values[at++];
                }
            }
        }
    }
    out.coeffs = std::move(coeffs);

    if (const auto* seg = genome.layout.find("init_weights")) {
        out.init_weights =
            WeightState::from_flat(topology, genome.values.segment(seg->offset, seg->length));
    }
    return out;
}

Genome encode(const DecodedGenome& decoded, const NetworkTopology& topology) {
    Genome g;
    g.layout = layout_for(topology, decoded.mode);
    g.values.resize(g.layout.total_len);

    if (decoded.mode.kind == GenomeMode::Kind::static_weights) {
        const auto* seg = g.layout.find("direct_weights");
        const int conv_len = topology.conv_param_count();
        if (static_cast<int>(decoded.conv_params.size()) != conv_len || !decoded.direct_weights) {
            throw std::invalid_argument("static genome needs conv params and direct weights");
        }
        for (int i = 0; i < conv_len; ++i) g.values[seg->offset + i] = decoded.conv_params[i];
        g.values.segment(seg->offset + conv_len, seg->length - conv_len) =
            decoded.direct_weights->flatten();
        return g;
    }

    if (const auto* seg = g.layout.find("conv_static")) {
        if (static_cast<int>(decoded.conv_params.size()) != seg->length) {
            throw std::invalid_argument("conv param count does not match layout");
        }
        for (int i = 0; i < seg->length; ++i) g.values[seg->offset + i] = decoded.conv_params[i];
    }

    if (!decoded.coeffs) throw std::invalid_argument("hebbian genome needs coefficient tensors");
    const auto* pl = g.layout.find("plasticity");
    int at = pl->offset;
    auto coeffs = *decoded.coeffs;  // class_tensor needs mutable access
    for (const std::string& cls : active_coefficient_classes(decoded.mode.variant)) {
        auto* tensor = class_tensor(coeffs, cls);
        for (auto& m : *tensor) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    g.values[at++] = m(i, j);
                }
            }
        }
    }

    if (const auto* seg = g.layout.find("init_weights")) {
        if (!decoded.init_weights) {
            throw std::invalid_argument("co-evolving genome needs initial weights");
        }
        g.values.segment(seg->offset, seg->length) = decoded.init_weights->flatten();
    }
    return g;
}

Genome init_genome(const GenomeLayout& layout, std::uint64_t seed) {
    Genome g;
    g.layout = layout;
    g.seed = seed;
    g.values.resize(layout.total_len);
    Rng rng(derive_seed(seed, {stream::genome_init}));
    for (const auto& seg : layout.segments) {
        const double half_range = seg.name == "plasticity" ? 1.0 : 0.1;
        for (int i = 0; i < seg.length; ++i) {
            g.values[seg.offset + i] = rng.uniform(-half_range, half_range);
        }
    }
    return g;
}

void save_genome(const std::string& path, const Genome& genome) {
    std::ostringstream buf(std::ios::binary);
    io::write_u32(buf, kGenomeMagic);
    io::write_u32(buf, kGenomeVersion);
    io::write_u32(buf, genome.layout.mode.kind == GenomeMode::Kind::hebbian ? 0u : 1u);
    io::write_string(buf, to_string(genome.layout.mode.variant));
    io::write_u32(buf, genome.layout.mode.coevolve_init ? 1u : 0u);
    io::write_u64(buf, genome.layout.topology_hash);
    io::write_u32(buf, static_cast<std::uint32_t>(genome.layout.segments.size()));
    for (const auto& seg : genome.layout.segments) {
        io::write_string(buf, seg.name);
        io::write_i32(buf, seg.offset);
        io::write_i32(buf, seg.length);
    }
    io::write_u64(buf, genome.seed);
    io::write_i32(buf, genome.generation);
    io::write_f64_array(buf, genome.values);

    const std::string body = buf.str();
    std::ostringstream with_sum(std::ios::binary);
    with_sum.write(body.data(), static_cast<std::streamsize>(body.size()));
    io::write_u64(with_sum, io::fnv1a64(body.data(), body.size()));
    io::atomic_write_file(path, with_sum.str());
}

Genome load_genome(const std::string& path, const NetworkTopology& expected_topology) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open genome file " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.size() < 8) throw std::runtime_error("genome file truncated: " + path);
    const std::size_t body_len = content.size() - 8;
    std::istringstream buf(content, std::ios::binary);

    if (io::read_u32(buf) != kGenomeMagic) throw std::runtime_error("not a genome file: " + path);
    if (io::read_u32(buf) != kGenomeVersion) {
        throw std::runtime_error("unsupported genome version in " + path);
    }

    Genome g;
    const std::uint32_t kind = io::read_u32(buf);
    g.layout.mode.kind = kind == 0 ? GenomeMode::Kind::hebbian : GenomeMode::Kind::static_weights;
    g.layout.mode.variant = variant_from_string(io::read_string(buf));
    g.layout.mode.coevolve_init = io::read_u32(buf) != 0;
    g.layout.topology_hash = io::read_u64(buf);
    const std::uint32_t n_segments = io::read_u32(buf);
    for (std::uint32_t i = 0; i < n_segments; ++i) {
        GenomeSegment seg;
        seg.name = io::read_string(buf);
        seg.offset = io::read_i32(buf);
        seg.length = io::read_i32(buf);
        g.layout.segments.push_back(seg);
        g.layout.total_len += seg.length;
    }
    g.seed = io::read_u64(buf);
    g.generation = io::read_i32(buf);
    g.values = io::read_f64_array(buf);

    const std::uint64_t stored_sum = io::read_u64(buf);
    if (stored_sum != io::fnv1a64(content.data(), body_len)) {
        throw std::runtime_error("genome file checksum mismatch: " + path);
    }
    if (g.layout.topology_hash != expected_topology.hash()) {
        throw std::runtime_error("genome topology hash mismatch: file written for a different network");
    }
    const GenomeLayout expected = layout_for(expected_topology, g.layout.mode);
    if (g.layout != expected || g.values.size() != g.layout.total_len) {
        throw std::runtime_error("genome layout in " + path + " is inconsistent with the topology");
    }
    return g;
}

}  // namespace hebbnet
