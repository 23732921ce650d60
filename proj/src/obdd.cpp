#include "qobdd/obdd.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "qobdd/text.hpp"

namespace qobdd {

namespace {

std::atomic<std::uint32_t> next_manager_id{1};

constexpr bool is_commutative(Op op) noexcept {
  const unsigned t = static_cast<unsigned>(op);
  return ((t >> 1) & 1u) == ((t >> 2) & 1u);
}

constexpr std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) noexcept {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

// VarOrder

VarOrder::VarOrder(std::vector<Var> vars) : vars_(std::move(vars)) {
  Var max = 0;
  for (Var v : vars_)
    max = std::max(max, v);
  rank_.assign(vars_.empty() ? 0 : max + 1, kAbsent);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const Var v = vars_[i];
    if (v == 0)
      throw OrderError("variable order contains id 0");
    if (rank_[v] != kAbsent)
      throw OrderError("variable " + std::to_string(v) + " occurs twice in order");
    rank_[v] = static_cast<std::uint32_t>(i);
  }
}

std::uint32_t VarOrder::rank(Var v) const {
  if (!contains(v))
    throw OrderError("variable " + std::to_string(v) + " is not in the order");
  return rank_[v];
}

// CompleteObdd

std::size_t CompleteObdd::width() const noexcept {
  std::size_t w = 0;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i)
    w = std::max(w, layers[i].size());
  return w;
}

std::size_t CompleteObdd::size() const noexcept {
  std::size_t n = 0;
  for (const auto &layer : layers)
    n += layer.size();
  return n;
}

bool CompleteObdd::evaluate(std::span<const std::uint8_t> values) const {
  std::uint32_t at = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Node &n = layers[i][at];
    at = values[order[i]] ? n.hi : n.lo;
  }
  return sink_values[at];
}

// Manager

std::size_t Manager::TripleHash::operator()(const Node &n) const noexcept {
  std::uint64_t h = n.var;
  h = h * 0x9E3779B97F4A7C15ull ^ n.lo;
  h = h * 0x9E3779B97F4A7C15ull ^ n.hi;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

Manager::Manager(VarOrder order, std::size_t node_budget)
    : order_(std::move(order)), id_(next_manager_id.fetch_add(1)),
      budget_(node_budget) {
  nodes_.push_back({0, 0, 0});
  nodes_.push_back({0, 1, 1});
}

std::uint32_t Manager::check(NodeRef f) const {
  if (f.manager != id_)
    throw StructureError("node reference belongs to a different manager");
  if (f.index >= nodes_.size())
    throw StructureError("dangling node reference");
  return f.index;
}

std::uint32_t Manager::make_index(Var v, std::uint32_t lo, std::uint32_t hi) {
  if (lo == hi)
    return lo;
  const Node key{v, lo, hi};
  if (auto it = unique_.find(key); it != unique_.end())
    return it->second;
  if (nodes_.size() >= budget_)
    throw BudgetExceeded("node budget of " + std::to_string(budget_) + " exceeded");
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(key);
  unique_.emplace(key, index);
  return index;
}

NodeRef Manager::make(Var v, NodeRef lo, NodeRef hi) {
  const std::uint32_t l = check(lo), h = check(hi);
  if (l == h)
    return lo;
  const std::uint32_t r = order_.rank(v);
  if (r >= level_of(l) || r >= level_of(h))
    throw OrderError("variable " + std::to_string(v) +
                     " does not precede the variables of its children");
  return {id_, make_index(v, l, h)};
}

NodeRef Manager::literal(Var v, bool positive) {
  return positive ? make(v, zero(), one()) : make(v, one(), zero());
}

NodeRef Manager::clause(std::span<const int> literals) {
  // Build bottom-up along the order so every make() call is legal.
  std::vector<std::pair<std::uint32_t, int>> lits;
  lits.reserve(literals.size());
  for (int lit : literals)
    lits.emplace_back(order_.rank(static_cast<Var>(std::abs(lit))), lit);
  std::sort(lits.begin(), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i)
    if (lits[i].first == lits[i - 1].first && lits[i].second != lits[i - 1].second)
      return one();
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::uint32_t acc = 0;
  for (auto it = lits.rbegin(); it != lits.rend(); ++it) {
    const Var v = static_cast<Var>(std::abs(it->second));
    acc = it->second > 0 ? make_index(v, acc, 1) : make_index(v, 1, acc);
  }
  return {id_, acc};
}

std::uint32_t Manager::apply_rec(Op op, std::uint32_t f, std::uint32_t g) {
  if (f < 2 && g < 2)
    return eval_op(op, f == 1, g == 1) ? 1 : 0;
  // One constant operand turns op into a unary function of the other.
  if (f < 2 || g < 2) {
    const bool c = (f < 2 ? f : g) == 1;
    const std::uint32_t other = f < 2 ? g : f;
    const bool u0 = f < 2 ? eval_op(op, c, false) : eval_op(op, false, c);
    const bool u1 = f < 2 ? eval_op(op, c, true) : eval_op(op, true, c);
    if (u0 == u1)
      return u0 ? 1 : 0;
    return u1 ? other : negate_rec(other);
  }
  if (f == g) {
    const bool u0 = eval_op(op, false, false), u1 = eval_op(op, true, true);
    if (u0 == u1)
      return u0 ? 1 : 0;
    return u1 ? f : negate_rec(f);
  }
  if (is_commutative(op) && f > g)
    std::swap(f, g);
  auto &cache = apply_cache_[static_cast<unsigned>(op)];
  const std::uint64_t key = pair_key(f, g);
  if (auto it = cache.find(key); it != cache.end())
    return it->second;

  const std::uint32_t lf = level_of(f), lg = level_of(g);
  const std::uint32_t top = std::min(lf, lg);
  const Node nf = nodes_[f], ng = nodes_[g];
  const std::uint32_t f0 = lf == top ? nf.lo : f, f1 = lf == top ? nf.hi : f;
  const std::uint32_t g0 = lg == top ? ng.lo : g, g1 = lg == top ? ng.hi : g;
  const std::uint32_t lo = apply_rec(op, f0, g0);
  const std::uint32_t hi = apply_rec(op, f1, g1);
  const std::uint32_t r = make_index(order_.at(top), lo, hi);
  cache.emplace(key, r);
  return r;
}

NodeRef Manager::apply(Op op, NodeRef f, NodeRef g) {
  const std::uint32_t a = check(f), b = check(g);
  return {id_, apply_rec(op, a, b)};
}

std::uint32_t Manager::negate_rec(std::uint32_t f) {
  if (f < 2)
    return 1 - f;
  if (auto it = negate_cache_.find(f); it != negate_cache_.end())
    return it->second;
  const Node n = nodes_[f];
  const std::uint32_t lo = negate_rec(n.lo);
  const std::uint32_t hi = negate_rec(n.hi);
  const std::uint32_t r = make_index(n.var, lo, hi);
  negate_cache_.emplace(f, r);
  negate_cache_.emplace(r, f);
  return r;
}

NodeRef Manager::negate(NodeRef f) { return {id_, negate_rec(check(f))}; }

std::uint32_t Manager::restrict_rec(std::uint32_t f, std::uint32_t rank, bool value,
                                    std::unordered_map<std::uint32_t, std::uint32_t> &memo) {
  const std::uint32_t lf = level_of(f);
  if (lf > rank)
    return f;
  const Node n = nodes_[f];
  if (lf == rank)
    return value ? n.hi : n.lo;
  if (auto it = memo.find(f); it != memo.end())
    return it->second;
  const std::uint32_t lo = restrict_rec(n.lo, rank, value, memo);
  const std::uint32_t hi = restrict_rec(n.hi, rank, value, memo);
  const std::uint32_t r = make_index(n.var, lo, hi);
  memo.emplace(f, r);
  return r;
}

NodeRef Manager::restrict(NodeRef f, Var x, bool value) {
  const std::uint32_t i = check(f);
  if (!order_.contains(x))
    return f;
  std::unordered_map<std::uint32_t, std::uint32_t> memo;
  return {id_, restrict_rec(i, order_.rank(x), value, memo)};
}

NodeRef Manager::exists(NodeRef f, Var x) {
  return disj(restrict(f, x, false), restrict(f, x, true));
}

NodeRef Manager::forall(NodeRef f, Var x) {
  return conj(restrict(f, x, false), restrict(f, x, true));
}

std::size_t Manager::size(NodeRef f) const {
  const NodeRef roots[] = {f};
  return shared_size(roots);
}

std::size_t Manager::shared_size(std::span<const NodeRef> roots) const {
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack;
  for (NodeRef r : roots)
    stack.push_back(check(r));
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    if (!seen.insert(i).second || i < 2)
      continue;
    stack.push_back(nodes_[i].lo);
    stack.push_back(nodes_[i].hi);
  }
  return seen.size();
}

std::vector<Var> Manager::support(NodeRef f) const {
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack{check(f)};
  std::vector<std::uint32_t> ranks;
  std::unordered_set<Var> vars;
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    if (i < 2 || !seen.insert(i).second)
      continue;
    if (vars.insert(nodes_[i].var).second)
      ranks.push_back(level_of(i));
    stack.push_back(nodes_[i].lo);
    stack.push_back(nodes_[i].hi);
  }
  std::sort(ranks.begin(), ranks.end());
  std::vector<Var> out;
  out.reserve(ranks.size());
  for (std::uint32_t r : ranks)
    out.push_back(order_.at(r));
  return out;
}

bool Manager::depends_on(NodeRef f, Var x) const {
  const auto s = support(f);
  return std::find(s.begin(), s.end(), x) != s.end();
}

bool Manager::evaluate(NodeRef f, std::span<const std::uint8_t> values) const {
  std::uint32_t i = check(f);
  while (i >= 2) {
    const Node &n = nodes_[i];
    if (n.var >= values.size())
      throw StructureError("assignment does not cover variable " + std::to_string(n.var));
    i = values[n.var] ? n.hi : n.lo;
  }
  return i == 1;
}

CompleteObdd Manager::complete(NodeRef f) const {
  const std::size_t n = order_.size();
  CompleteObdd out;
  out.order.assign(order_.vars().begin(), order_.vars().end());
  out.layers.resize(n + 1);
  out.layers[0].push_back({{id_, check(f)}, 0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    std::unordered_map<std::uint32_t, std::uint32_t> next;
    auto &below = out.layers[i + 1];
    auto slot = [&](std::uint32_t g) {
      auto [it, fresh] = next.emplace(g, static_cast<std::uint32_t>(below.size()));
      if (fresh)
        below.push_back({{id_, g}, 0, 0});
      return it->second;
    };
    for (auto &node : out.layers[i]) {
      const std::uint32_t g = node.function.index;
      if (level_of(g) == i) {
        node.lo = slot(nodes_[g].lo);
        node.hi = slot(nodes_[g].hi);
      } else {
        node.lo = node.hi = slot(g);
      }
    }
  }
  for (const auto &sink : out.layers[n])
    out.sink_values.push_back(sink.function.index == 1);
  return out;
}

std::size_t Manager::complete_width(NodeRef f) const {
  const std::size_t n = order_.size();
  std::vector<std::uint32_t> layer{check(f)};
  std::size_t width = n == 0 ? 0 : 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::unordered_set<std::uint32_t> next;
    for (std::uint32_t g : layer) {
      if (level_of(g) == i) {
        next.insert(nodes_[g].lo);
        next.insert(nodes_[g].hi);
      } else {
        next.insert(g);
      }
    }
    layer.assign(next.begin(), next.end());
    width = std::max(width, layer.size());
  }
  return width;
}

void Manager::clear_caches() {
  for (auto &cache : apply_cache_)
    cache.clear();
  negate_cache_.clear();
}

std::optional<std::string> Manager::audit() const {
  if (unique_.size() + 2 != nodes_.size())
    return "unique table size does not match node store";
  for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
    const Node &n = nodes_[i];
    if (n.lo == n.hi)
      return "node " + std::to_string(i) + " has identical children";
    if (n.lo >= i || n.hi >= i)
      return "node " + std::to_string(i) + " refers to a later node";
    if (!order_.contains(n.var))
      return "node " + std::to_string(i) + " tests a variable outside the order";
    const std::uint32_t l = order_.rank(n.var);
    if (l >= level_of(n.lo) || l >= level_of(n.hi))
      return "node " + std::to_string(i) + " violates the variable order";
    auto it = unique_.find(n);
    if (it == unique_.end() || it->second != i)
      return "node " + std::to_string(i) + " is duplicated or missing from the unique table";
  }
  return std::nullopt;
}

// ObddBlock

void write_block(std::ostream &out, const Manager &mgr, NodeRef f) {
  std::unordered_map<std::uint32_t, std::size_t> index;
  std::vector<NodeRef> emitted;
  // Iterative post-order: lo subtree, hi subtree, node.
  std::vector<std::pair<NodeRef, bool>> stack{{f, false}};
  while (!stack.empty()) {
    auto [g, expanded] = stack.back();
    stack.pop_back();
    if (index.count(g.index))
      continue;
    if (mgr.is_const(g) || expanded) {
      index.emplace(g.index, emitted.size());
      emitted.push_back(g);
      continue;
    }
    stack.push_back({g, true});
    stack.push_back({mgr.hi(g), false});
    stack.push_back({mgr.lo(g), false});
  }
  out << "obdd " << emitted.size() << '\n';
  for (std::size_t i = 0; i < emitted.size(); ++i) {
    const NodeRef g = emitted[i];
    out << i << ' ';
    if (mgr.is_const(g))
      out << (mgr.is_one(g) ? "T1" : "T0") << " - -\n";
    else
      out << mgr.var(g) << ' ' << index.at(mgr.lo(g).index) << ' '
          << index.at(mgr.hi(g).index) << '\n';
  }
}

std::string block_to_string(const Manager &mgr, NodeRef f) {
  std::ostringstream out;
  write_block(out, mgr, f);
  return out.str();
}

NodeRef read_block(LineReader &in, Manager &mgr) {
  std::string line;
  if (!in.next(line))
    throw ParseError(in.line_no(), "expected 'obdd <k>', got end of input");
  auto head = split_ws(line);
  if (head.size() != 2 || head[0] != "obdd")
    throw ParseError(in.line_no(), "expected 'obdd <k>'");
  const std::uint64_t k = parse_uint(head[1], in.line_no());
  if (k == 0)
    throw ParseError(in.line_no(), "empty OBDD block");
  std::vector<NodeRef> refs;
  refs.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    if (!in.next(line))
      throw ParseError(in.line_no(), "OBDD block truncated");
    auto tok = split_ws(line);
    if (tok.size() != 4)
      throw ParseError(in.line_no(), "expected '<idx> <var|T0|T1> <lo> <hi>'");
    if (parse_uint(tok[0], in.line_no()) != i)
      throw ParseError(in.line_no(), "OBDD block indices must be consecutive");
    if (tok[1] == "T0" || tok[1] == "T1") {
      if (tok[2] != "-" || tok[3] != "-")
        throw ParseError(in.line_no(), "sink nodes must have '-' children");
      refs.push_back(mgr.constant(tok[1] == "T1"));
      continue;
    }
    const std::uint64_t v = parse_uint(tok[1], in.line_no());
    const std::uint64_t lo = parse_uint(tok[2], in.line_no());
    const std::uint64_t hi = parse_uint(tok[3], in.line_no());
    if (lo >= i || hi >= i)
      throw ParseError(in.line_no(), "OBDD block children must precede their parent");
    if (v == 0 || v > UINT32_MAX || !mgr.order().contains(static_cast<Var>(v)))
      throw OrderError("line " + std::to_string(in.line_no()) + ": variable " +
                       std::string(tok[1]) + " is not in the order");
    try {
      refs.push_back(mgr.make(static_cast<Var>(v), refs[lo], refs[hi]));
    } catch (const OrderError &e) {
      throw OrderError("line " + std::to_string(in.line_no()) + ": " + e.what());
    }
  }
  return refs.back();
}

NodeRef block_from_string(const std::string &text, Manager &mgr) {
  std::istringstream in(text);
  LineReader reader(in);
  return read_block(reader, mgr);
}

} // namespace qobdd
