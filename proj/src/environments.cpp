#include "provex/environments.hpp"

#include <algorithm>
#include <bit>

#include "provex/error.hpp"

namespace provex {

namespace {

using Bits = Labels::Bits;

std::size_t popcount(const Bits& b) {
  std::size_t n = 0;
  for (auto w : b) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

// Smaller sets first; among equal sizes the one holding the lowest differing
// root (roots are numbered in id order) comes first.
bool canonical_less(const Bits& a, const Bits& b, std::size_t size_a, std::size_t size_b) {
  if (size_a != size_b) return size_a < size_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto diff = a[i] ^ b[i];
    if (diff) return (a[i] & (diff & (~diff + 1))) != 0;
  }
  return false;
}

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

bool disjoint(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & b[i]) return false;
  return true;
}

// Sorts, drops duplicates and supersets, keeps at most `cap` environments.
std::vector<Bits> minimize(std::vector<Bits> candidates, std::size_t cap, bool& overflow) {
  std::vector<std::pair<std::size_t, Bits>> sized;
  sized.reserve(candidates.size());
  for (auto& c : candidates) sized.emplace_back(popcount(c), std::move(c));
  std::sort(sized.begin(), sized.end(),
            [](const auto& x, const auto& y) { return canonical_less(x.second, y.second, x.first, y.first); });
  std::vector<Bits> kept;
  for (auto& [size, c] : sized) {
    if (!kept.empty() && kept.back() == c) continue;
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const Bits& k) { return subset_of(k, c); });
    if (dominated) continue;
    if (kept.size() == cap) {
      overflow = true;
      break;
    }
    kept.push_back(std::move(c));
  }
  return kept;
}

std::vector<Bits> conjoin(const std::vector<Bits>& a, const std::vector<Bits>& b, std::size_t cap, bool& overflow) {
  std::vector<Bits> product;
  product.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      Bits u = x;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] |= y[i];
      product.push_back(std::move(u));
    }
  return minimize(std::move(product), cap, overflow);
}

Environment to_environment(const std::vector<NodeId>& roots, const Bits& bits) {
  Environment env;
  for (std::size_t w = 0; w < bits.size(); ++w) {
    auto word = bits[w];
    while (word) {
      const int bit = std::countr_zero(word);
      env.insert(roots[w * 64 + static_cast<std::size_t>(bit)]);
      word &= word - 1;
    }
  }
  return env;
}

}  // namespace

Label Labels::label(const NodeId& id) const {
  const auto& envs = raw(id);
  Label out;
  out.overflow = overflow_[index_.at(id)] != 0;
  out.environments.reserve(envs.size());
  for (const auto& bits : envs) out.environments.push_back(decode(bits));
  return out;
}

bool Labels::overflow(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "unknown node " + id);
  return overflow_[it->second] != 0;
}

bool Labels::any_overflow() const {
  return std::any_of(overflow_.begin(), overflow_.end(), [](char c) { return c != 0; });
}

const std::vector<Bits>& Labels::raw(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "unknown node " + id);
  return envs_[it->second];
}

Bits Labels::mask(const std::set<NodeId>& ids) const {
  Bits bits((roots_.size() + 63) / 64, 0);
  for (const auto& id : ids)
    if (auto it = root_bit_.find(id); it != root_bit_.end()) bits[it->second / 64] |= std::uint64_t{1} << (it->second % 64);
  return bits;
}

Environment Labels::decode(const Bits& bits) const { return to_environment(roots_, bits); }

Labels compute_labels(const ProvGraph& graph, std::size_t cap) {
  return compute_labels(graph, build_support_model(graph), cap);
}

Labels compute_labels(const ProvGraph& graph, const SupportModel& model, std::size_t cap) {
  if (cap == 0) throw Error(ErrorCode::InvalidArgument, "label cap must be at least 1");
  const std::size_t n = model.size();
  Labels labels;
  for (NodeIndex i = 0; i < n; ++i) labels.index_.emplace(graph.node(i).id, i);
  for (NodeIndex r : model.roots) {
    labels.root_bit_.emplace(graph.node(r).id, labels.roots_.size());
    labels.roots_.push_back(graph.node(r).id);
  }
  const std::size_t words = (labels.roots_.size() + 63) / 64;
  labels.envs_.assign(n, {});
  labels.overflow_.assign(n, 0);

  std::vector<char> done(n, 0);
  auto evaluate = [&](NodeIndex node) {
    ++labels.evaluations_;
    bool overflow = false;
    if (model.is_root(node)) {
      Bits self(words, 0);
      const auto bit = labels.root_bit_.at(graph.node(node).id);
      self[bit / 64] |= std::uint64_t{1} << (bit % 64);
      labels.envs_[node] = {std::move(self)};
      return;
    }
    std::vector<Bits> disjunction;
    for (const auto& alt : model.alternatives[node]) {
      std::vector<Bits> acc = labels.envs_[alt.front()];
      overflow |= labels.overflow_[alt.front()] != 0;
      for (std::size_t k = 1; k < alt.size(); ++k) {
        overflow |= labels.overflow_[alt[k]] != 0;
        acc = conjoin(acc, labels.envs_[alt[k]], cap, overflow);
      }
      disjunction.insert(disjunction.end(), std::make_move_iterator(acc.begin()), std::make_move_iterator(acc.end()));
    }
    labels.envs_[node] = minimize(std::move(disjunction), cap, overflow);
    labels.overflow_[node] = overflow ? 1 : 0;
  };

  // Post-order DFS over support edges, started from each sink in id order.
  std::vector<std::pair<NodeIndex, std::size_t>> stack;
  std::vector<std::vector<NodeIndex>> members(n);
  for (NodeIndex i = 0; i < n; ++i) {
    for (const auto& alt : model.alternatives[i]) members[i].insert(members[i].end(), alt.begin(), alt.end());
    std::sort(members[i].begin(), members[i].end());
    members[i].erase(std::unique(members[i].begin(), members[i].end()), members[i].end());
  }
  for (NodeIndex sink : model.sinks) {
    if (done[sink]) continue;
    stack.emplace_back(sink, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < members[node].size()) {
        const NodeIndex child = members[node][next++];
        if (!done[child]) stack.emplace_back(child, 0);
        continue;
      }
      const NodeIndex finished = node;
      stack.pop_back();
      if (done[finished]) continue;
      evaluate(finished);
      done[finished] = 1;
    }
  }
  if (labels.evaluations_ != n) throw Error(ErrorCode::CyclicSupport, "support graph has unreachable cycles");
  return labels;
}

Label contract(const Label& label, const std::set<NodeId>& refuted) {
  Label out;
  out.overflow = label.overflow;
  for (const auto& env : label.environments) {
    const bool hit = std::any_of(env.begin(), env.end(), [&](const NodeId& id) { return refuted.contains(id); });
    if (!hit) out.environments.push_back(env);
  }
  return out;
}

bool is_necessary(const Labels& labels, const NodeId& m, const std::set<NodeId>& refuted) {
  const auto& envs = labels.raw(m);
  const auto mask = labels.mask(refuted);
  const bool survivor = std::any_of(envs.begin(), envs.end(), [&](const Bits& e) { return disjoint(e, mask); });
  if (survivor) return false;
  if (labels.overflow(m))
    throw Error(ErrorCode::OverflowUnsound, "label of " + m + " is truncated; necessity cannot be certified");
  return true;
}

std::set<NodeId> necessary_assumptions(const Labels& labels, const NodeId& m) {
  if (labels.overflow(m)) throw Error(ErrorCode::OverflowUnsound, "label of " + m + " is truncated");
  const auto& envs = labels.raw(m);
  if (envs.empty()) return {};
  Bits common = envs.front();
  for (const auto& e : envs)
    for (std::size_t i = 0; i < common.size(); ++i) common[i] &= e[i];
  return labels.decode(common);
}

std::vector<Environment> sufficient_sets(const Labels& labels, const NodeId& m) {
  if (labels.overflow(m)) throw Error(ErrorCode::OverflowUnsound, "label of " + m + " is truncated");
  return labels.label(m).environments;
}

std::map<NodeId, std::vector<std::string>> assumption_strings(const ProvGraph& graph, const std::set<NodeId>& nodes) {
  std::map<NodeId, std::vector<std::string>> out;
  for (const auto& id : nodes) {
    std::vector<std::string> strings;
    for (const auto* appraisal : graph.appraisals_of(id))
      for (const auto& a : appraisal->assumptions)
        if (std::find(strings.begin(), strings.end(), a) == strings.end()) strings.push_back(a);
    if (!strings.empty()) out.emplace(id, std::move(strings));
  }
  return out;
}

nlohmann::json to_json(const Label& label) {
  nlohmann::json envs = nlohmann::json::array();
  for (const auto& env : label.environments) envs.push_back(env);
  return {{"environments", std::move(envs)}, {"overflow", label.overflow}};
}

nlohmann::json labels_to_json(const ProvGraph& graph, const Labels& labels) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& node : graph.nodes()) out[node.id] = to_json(labels.label(node.id));
  return out;
}

}  // namespace provex
