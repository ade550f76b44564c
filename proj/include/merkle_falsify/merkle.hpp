#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "merkle_falsify/hashing.hpp"

namespace merkle_falsify {

// Binary hash tree over data blocks. Leaves are H(payload); each parent is
// H(left || right). A level of odd length (other than the root) is padded by
// repeating its last digest, so every stored level below the root has even
// length and levels()[0].size() is the padded leaf count.
//
// Leaves and internal nodes share one hash with no domain separation, which
// admits the classic second-preimage trick of presenting an internal node as
// a leaf. That matches the analysed construction and is not mitigated here.
class MerkleTree {
 public:
  // Throws UsageError on an empty leaf list.
  static MerkleTree Build(std::span<const Bytes> leaves, const HashSpec& spec);

  const HashSpec& spec() const { return spec_; }
  std::size_t leaf_count() const { return leaf_count_; }
  const std::vector<std::vector<Digest>>& levels() const { return levels_; }
  const Digest& root() const { return levels_.back().front(); }

 private:
  MerkleTree(HashSpec spec, std::size_t leaf_count, std::vector<std::vector<Digest>> levels)
      : spec_(spec), leaf_count_(leaf_count), levels_(std::move(levels)) {}

  HashSpec spec_;
  std::size_t leaf_count_;
  std::vector<std::vector<Digest>> levels_;
};

inline MerkleTree build_tree(std::span<const Bytes> leaves, const HashSpec& spec) {
  return MerkleTree::Build(leaves, spec);
}
inline const Digest& root(const MerkleTree& tree) { return tree.root(); }

// Which side of the running node the sibling is concatenated on.
enum class Side { kLeft, kRight };

struct ProofStep {
  Digest sibling;
  Side side;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct MerkleProof {
  unsigned bits = 0;
  std::size_t leaf_index = 0;
  std::vector<ProofStep> steps;

  std::size_t path_length() const { return steps.size(); }

  friend bool operator==(const MerkleProof&, const MerkleProof&) = default;
};

// Throws UsageError if index >= tree.leaf_count().
MerkleProof generate_proof(const MerkleTree& tree, std::size_t index);

// Recomputes the root from `data` along `proof` and compares it with
// `expected_root`. A width mismatch between spec, proof and root is a
// UsageError, not a failed verification.
bool verify_proof(ByteView data, const MerkleProof& proof, const Digest& expected_root,
                  const HashSpec& spec);

// The root that verify_proof would reconstruct.
Digest reconstruct_root(ByteView data, const MerkleProof& proof, const HashSpec& spec);

// Fixed parent-first fold: N_0 = leaf, N_j = H(N_{j-1} || siblings[j-1]).
Digest fold_path(const Digest& leaf_digest, std::span<const Digest> siblings,
                 const HashSpec& spec, OracleState* oracle = nullptr);

// Same fold, but level j (1-based) is hashed with level_oracles[j-1], giving
// each tree level its own independent ideal oracle. Requires
// level_oracles.size() >= siblings.size().
Digest fold_path(const Digest& leaf_digest, std::span<const Digest> siblings,
                 const HashSpec& spec, std::span<OracleState> level_oracles);

// {"version":1,"bits":b,"leaf_index":i,"steps":[{"sibling":"<hex>","side":"left"|"right"}]}
std::string proof_to_json(const MerkleProof& proof);
// Throws UsageError on malformed documents.
MerkleProof proof_from_json(std::string_view text);

}  // namespace merkle_falsify
