#pragma once

#include "crnoma/agents.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace crnoma {

struct ParamBlock {
    std::string name;
    const std::vector<double>* data = nullptr;
};

// Binary file of little-endian 64-bit floats, block after block, plus a JSON
// manifest listing {name, offset, count} per block (offsets in doubles).
void save_checkpoint(const std::string& bin_path, const std::string& manifest_path,
                     const std::vector<ParamBlock>& blocks);

std::map<std::string, std::vector<double>> load_checkpoint(const std::string& bin_path,
                                                           const std::string& manifest_path);

std::vector<ParamBlock> agent_param_blocks(Agent& agent);

// Assign loaded blocks into an agent's parameters. Every parameter of the
// agent must be present with a matching size.
void load_agent_params(Agent& agent, const std::map<std::string, std::vector<double>>& blocks);

} // namespace crnoma
