#include "crnoma/checkpoint.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace crnoma {

namespace {

void put_le64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_le64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("checkpoint: truncated binary file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

} // namespace

void save_checkpoint(const std::string& bin_path, const std::string& manifest_path,
                     const std::vector<ParamBlock>& blocks) {
    std::ofstream bin(bin_path, std::ios::binary | std::ios::trunc);
    if (!bin) throw std::runtime_error("checkpoint: cannot open " + bin_path);
    nlohmann::json manifest = nlohmann::json::array();
    std::size_t offset = 0;
    for (const ParamBlock& blk : blocks) {
        for (double v : *blk.data) put_le64(bin, v);
        manifest.push_back({{"name", blk.name}, {"offset", offset}, {"count", blk.data->size()}});
        offset += blk.data->size();
    }
    bin.flush();
    if (!bin) throw std::runtime_error("checkpoint: write failed for " + bin_path);

    std::ofstream mf(manifest_path, std::ios::trunc);
    if (!mf) throw std::runtime_error("checkpoint: cannot open " + manifest_path);
    mf << manifest.dump(2) << "\n";
}

std::map<std::string, std::vector<double>> load_checkpoint(const std::string& bin_path,
                                                           const std::string& manifest_path) {
    std::ifstream mf(manifest_path);
    if (!mf) throw std::runtime_error("checkpoint: cannot open " + manifest_path);
    nlohmann::json manifest = nlohmann::json::parse(mf);

    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("checkpoint: cannot open " + bin_path);

    std::map<std::string, std::vector<double>> out;
    for (const auto& entry : manifest) {
        std::string name = entry.at("name").get<std::string>();
        std::size_t offset = entry.at("offset").get<std::size_t>();
        std::size_t count = entry.at("count").get<std::size_t>();
        bin.seekg(static_cast<std::streamoff>(offset * 8), std::ios::beg);
        std::vector<double> data(count);
        for (std::size_t i = 0; i < count; ++i) data[i] = get_le64(bin);
        if (!out.emplace(std::move(name), std::move(data)).second)
            throw std::runtime_error("checkpoint: duplicate block name in manifest");
    }
    return out;
}

std::vector<ParamBlock> agent_param_blocks(Agent& agent) {
    std::vector<ParamBlock> blocks;
    for (const auto& [name, w] : agent.named_params()) blocks.push_back({name, w});
    return blocks;
}

void load_agent_params(Agent& agent, const std::map<std::string, std::vector<double>>& blocks) {
    for (auto& [name, w] : agent.named_params()) {
        auto it = blocks.find(name);
        if (it == blocks.end())
            throw std::runtime_error("checkpoint: missing parameter block " + name);
        if (it->second.size() != w->size())
            throw std::runtime_error("checkpoint: size mismatch for block " + name);
        *w = it->second;
    }
}

} // namespace crnoma
