#include "cds/heap.hpp"

#include <algorithm>
#include <sstream>

namespace cds {

std::optional<std::string> HeapState::successor(const std::string& n, const std::string& label) const {
  auto it = succ.find({n, label});
  if (it == succ.end()) return std::nullopt;
  return it->second;
}

void HeapState::set_succ(const std::string& from, const std::string& label, const std::string& to) {
  succ[{from, label}] = to;
}

void HeapState::clear_succ(const std::string& from, const std::string& label) { succ.erase({from, label}); }

std::string HeapState::fingerprint() const {
  std::string s;
  for (const auto& [n, k] : keys) s += n + ":" + std::to_string(k) + ";";
  s += "|";
  for (const auto& [e, to] : succ) s += e.first + "." + e.second + ">" + to + ";";
  return s;
}

std::string HeapState::to_facts() const {
  std::ostringstream os;
  for (const auto& [e, to] : succ) {
    os << "edge(" << e.first << "," << to;
    if (e.second != kNextLabel) os << "," << e.second;
    os << "). ";
  }
  for (const auto& [n, k] : keys) os << "key(" << n << "," << k << "). ";
  std::string out = os.str();
  if (!out.empty()) out.pop_back();
  return out;
}

std::string fresh_node_id(std::int64_t key) { return "f" + std::to_string(key); }

namespace {

bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    std::string prefix = s.substr(0, i);
    long long num = i < s.size() ? std::stoll(s.substr(i)) : -1;
    return std::make_pair(prefix, num);
  };
  return split(a) < split(b);
}

} // namespace

bool node_less(const HeapState& s, const std::string& a, const std::string& b) {
  auto extremal = [&](const std::string& n) {
    auto it = s.keys.find(n);
    return it != s.keys.end() && (it->second == kMinKey || it->second == kMaxKey);
  };
  bool ea = extremal(a), eb = extremal(b);
  if (ea != eb) return !ea;
  return natural_less(a, b);
}

std::optional<std::string> Binding::node(const std::string& sym) const {
  auto it = nodes.find(sym);
  if (it == nodes.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> Binding::key(const std::string& var) const {
  auto it = keys.find(var);
  if (it == keys.end()) return std::nullopt;
  return it->second;
}

std::string Binding::to_string() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [k, v] : nodes) {
    s += (first ? "" : ", ") + k + ":" + v;
    first = false;
  }
  for (const auto& [k, v] : keys) {
    s += (first ? "" : ", ") + k + ":" + std::to_string(v);
    first = false;
  }
  return s + "}";
}

LockSet LockSet::of(const HeapState& s, std::vector<std::string> ns) {
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::stable_sort(ns.begin(), ns.end(), [&](const std::string& a, const std::string& b) {
    auto ka = s.keys.count(a) ? s.key(a) : kMaxKey;
    auto kb = s.keys.count(b) ? s.key(b) : kMaxKey;
    return ka < kb;
  });
  return {std::move(ns)};
}

bool LockSet::contains(const std::string& n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

bool LockSet::intersects(const LockSet& o) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const std::string& n) { return o.contains(n); });
}

HeapState prepare_fresh(const HeapState& s, const BlockSpec& block, const Binding& b) {
  HeapState out = s;
  for (const auto& sym : block.fresh) {
    auto id = b.node(sym);
    auto it = b.fresh.find(sym);
    if (!id || it == b.fresh.end()) continue;
    if (out.has_node(*id)) continue;
    out.add_node(*id, it->second);
  }
  return out;
}

std::optional<std::string> resolve_node(const Binding& b, const std::string& sym, const Theory& th) {
  if (th.is_sentinel(sym)) return sym;
  return b.node(sym);
}

} // namespace cds
