#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cds/ast.hpp"
#include "cds/datalog.hpp"
#include "cds/heap.hpp"

namespace cds {

/// Name of the key variable carrying an operation's argument.
inline const std::string kArgKeyVar = "Kt";

/// Knowledge base plus its compiled evaluator; shared by all reasoning.
class Context {
public:
  explicit Context(KnowledgeBase kb);

  const KnowledgeBase& kb() const { return kb_; }
  const Theory& theory() const { return kb_.theory; }
  const Evaluator& evaluator() const { return eval_; }
  Model derive(const HeapState& s) const { return eval_.evaluate(s); }
  bool root_holds(const Model& m) const { return m.contains(kb_.theory.root, {}); }
  /// Largest fresh-symbol count over all blocks.
  std::size_t max_fresh() const { return max_fresh_; }

private:
  KnowledgeBase kb_;
  Evaluator eval_;
  std::size_t max_fresh_ = 0;
};

/// Structures of the given theory's shape ordered by unfolding count; only
/// those satisfying the structural root are kept. Throws on negative depth.
std::vector<HeapState> unfold_instances(const Theory& theory, int max_depth);
/// Unfolding count of every state returned by unfold_instances, in order.
std::vector<int> unfold_depths(const Theory& theory, int max_depth);

struct MatchOptions {
  /// Fixes the argument key (oracle threads know what they insert/delete).
  std::optional<std::int64_t> arg_key;
  /// Node id for a fresh symbol carrying a key; defaults to fresh_node_id.
  std::function<std::string(const std::string& sym, std::int64_t key)> fresh_id;
  /// Precomputed model of matching_state(ctx, state); only valid with
  /// default fresh ids and no argument key.
  const Model* model = nullptr;
};

/// The state plus every default fresh candidate node for up to
/// ctx.max_fresh() fresh symbols. Unlinked candidates leave facts about
/// other nodes unchanged, so one model serves every block's matching.
HeapState matching_state(const Context& ctx, const HeapState& state);

/// Candidate keys for `m` fresh symbols: interior gap points of the state's
/// keys (plus extra keys), every permutation of each gap's points.
std::vector<std::vector<std::int64_t>> fresh_key_candidates(const HeapState& s, std::size_t m,
                                                            const std::vector<std::int64_t>& extra = {});

/// All bindings under which every pre literal holds, in tie-break order.
std::vector<Binding> match_pre(const Context& ctx, const BlockSpec& block, const HeapState& state,
                               const MatchOptions& opts = {});

/// Orders bindings: node ids in symbol order compared interior-first,
/// then keys.
bool binding_less(const HeapState& s, const BlockSpec& block, const Binding& a, const Binding& b);

class DeltaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OpBinding {
  std::string block;
  Binding binding;
};

struct Delta {
  HeapState state;
  int depth = 0;
  std::size_t index = 0; // position in unfold_instances order
  std::map<std::string, OpBinding> bindings;
};

/// First instance on which every destructive operation has a binding.
Delta least_delta(const Context& ctx, int max_depth);
/// First instance on which every destructive operation and the given block
/// apply; the block's own binding is stored under the block's operation.
Delta least_delta_for_block(const Context& ctx, const OperationSpec& op, const BlockSpec& block, int max_depth);

} // namespace cds
