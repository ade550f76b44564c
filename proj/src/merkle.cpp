#include "merkle_falsify/merkle.hpp"

#include <nlohmann/json.hpp>

#include "merkle_falsify/errors.hpp"

namespace merkle_falsify {

namespace {

void require_width(const Digest& d, unsigned bits, const char* what) {
  if (d.bit_length() != bits) {
    throw UsageError(std::string(what) + " is " + std::to_string(d.bit_length()) +
                     " bits, expected " + std::to_string(bits));
  }
}

}  // namespace

MerkleTree MerkleTree::Build(std::span<const Bytes> leaves, const HashSpec& spec) {
  if (leaves.empty()) throw UsageError("cannot build a Merkle tree with no leaves");

  std::vector<std::vector<Digest>> levels;
  std::vector<Digest> level;
  level.reserve(leaves.size() + 1);
  for (const Bytes& leaf : leaves) level.push_back(hash_bytes(leaf, spec));

  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> parent;
    parent.reserve(level.size() / 2 + 1);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      parent.push_back(hash_concat(level[i], level[i + 1], spec));
    }
    levels.push_back(std::move(level));
    level = std::move(parent);
  }
  levels.push_back(std::move(level));
  return MerkleTree(spec, leaves.size(), std::move(levels));
}

MerkleProof generate_proof(const MerkleTree& tree, std::size_t index) {
  if (index >= tree.leaf_count()) {
    throw UsageError("leaf index " + std::to_string(index) + " out of range for " +
                     std::to_string(tree.leaf_count()) + " leaves");
  }
  MerkleProof proof;
  proof.bits = tree.spec().bits();
  proof.leaf_index = index;
  const auto& levels = tree.levels();
  std::size_t pos = index;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k, pos /= 2) {
    const bool is_left = pos % 2 == 0;
    proof.steps.push_back({levels[k][pos ^ 1], is_left ? Side::kRight : Side::kLeft});
  }
  return proof;
}

Digest reconstruct_root(ByteView data, const MerkleProof& proof, const HashSpec& spec) {
  if (proof.bits != spec.bits()) {
    throw UsageError("proof is for " + std::to_string(proof.bits) + "-bit digests, spec uses " +
                     std::to_string(spec.bits()));
  }
  Digest current = hash_bytes(data, spec);
  for (const ProofStep& step : proof.steps) {
    require_width(step.sibling, spec.bits(), "proof sibling");
    current = step.side == Side::kRight ? hash_concat(current, step.sibling, spec)
                                        : hash_concat(step.sibling, current, spec);
  }
  return current;
}

bool verify_proof(ByteView data, const MerkleProof& proof, const Digest& expected_root,
                  const HashSpec& spec) {
  require_width(expected_root, spec.bits(), "expected root");
  return reconstruct_root(data, proof, spec) == expected_root;
}

Digest fold_path(const Digest& leaf_digest, std::span<const Digest> siblings,
                 const HashSpec& spec, OracleState* oracle) {
  require_width(leaf_digest, spec.bits(), "leaf digest");
  Digest current = leaf_digest;
  for (const Digest& sibling : siblings) current = hash_concat(current, sibling, spec, oracle);
  return current;
}

Digest fold_path(const Digest& leaf_digest, std::span<const Digest> siblings,
                 const HashSpec& spec, std::span<OracleState> level_oracles) {
  require_width(leaf_digest, spec.bits(), "leaf digest");
  if (level_oracles.size() < siblings.size()) {
    throw UsageError("need one oracle per path level");
  }
  Digest current = leaf_digest;
  for (std::size_t j = 0; j < siblings.size(); ++j) {
    current = hash_concat(current, siblings[j], spec, &level_oracles[j]);
  }
  return current;
}

std::string proof_to_json(const MerkleProof& proof) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["bits"] = proof.bits;
  doc["leaf_index"] = proof.leaf_index;
  doc["steps"] = nlohmann::ordered_json::array();
  for (const ProofStep& step : proof.steps) {
    doc["steps"].push_back({{"sibling", step.sibling.hex()},
                            {"side", step.side == Side::kLeft ? "left" : "right"}});
  }
  return doc.dump();
}

MerkleProof proof_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("malformed proof JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw UsageError("proof JSON must be an object");
    if (doc.at("version").get<int>() != 1) throw UsageError("unsupported proof version");
    const auto& bits_field = doc.at("bits");
    const auto& index_field = doc.at("leaf_index");
    if (!bits_field.is_number_unsigned() || !index_field.is_number_unsigned()) {
      throw UsageError("bits and leaf_index must be non-negative integers");
    }
    MerkleProof proof;
    proof.bits = bits_field.get<unsigned>();
    if (proof.bits == 0 || proof.bits > HashSpec::max_bits(HashAlgorithm::kSha256Truncated)) {
      throw UsageError("proof bit length out of range");
    }
    proof.leaf_index = index_field.get<std::size_t>();
    const auto& steps = doc.at("steps");
    if (!steps.is_array()) throw UsageError("steps must be an array");
    for (const auto& step : steps) {
      const auto& side = step.at("side").get_ref<const std::string&>();
      if (side != "left" && side != "right") throw UsageError("side must be \"left\" or \"right\"");
      const auto& hex = step.at("sibling").get_ref<const std::string&>();
      proof.steps.push_back(
          {Digest::FromHex(hex, proof.bits), side == "left" ? Side::kLeft : Side::kRight});
    }
    return proof;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed proof JSON: ") + e.what());
  }
}

}  // namespace merkle_falsify
