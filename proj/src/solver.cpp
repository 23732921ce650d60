#include "qobdd/solver.hpp"

#include <algorithm>
#include <chrono>

#include "qobdd/generators.hpp"

namespace qobdd {

std::optional<std::uint64_t> tower(std::uint64_t a, std::size_t q) {
  if (q == 0)
    throw Error("tower height must be at least 1");
  std::uint64_t t = a;
  for (std::size_t i = 1; i < q; ++i) {
    if (t >= 64)
      return std::nullopt;
    t = std::uint64_t{1} << t;
  }
  return t;
}

std::optional<std::size_t> bucket_of(const Pcnf &f, const Manager &mgr, NodeRef g) {
  std::optional<std::size_t> best;
  for (Var v : mgr.support(g)) {
    const std::size_t p = f.position(v);
    if (!best || p > *best)
      best = p;
  }
  return best;
}

std::vector<std::vector<std::size_t>> bucket_init(const Pcnf &f) {
  std::vector<std::vector<std::size_t>> buckets(f.prefix().size());
  const auto clauses = f.clauses();
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const Clause &c = clauses[i];
    bool taut = false;
    for (std::size_t k = 1; k < c.size(); ++k)
      taut = taut || var_of(c[k]) == var_of(c[k - 1]);
    if (c.empty() || taut)
      continue;
    buckets[f.position(f.rightmost(c))].push_back(i);
  }
  return buckets;
}

namespace {

struct Item {
  std::size_t line;  // 1-based trace line
  NodeRef ref;
  std::size_t size;
};

class Run {
public:
  Run(const Pcnf &f, const VarOrder &order, const SolveOptions &opts)
      : f_(f), opts_(opts), mgr_(std::make_shared<Manager>(order, opts.node_budget)),
        buckets_(f.prefix().size()), slot_(f.num_vars() + 1, 0) {
    const auto prefix = f.prefix();
    for (std::size_t i = 0; i < prefix.size();) {
      std::size_t j = i;
      while (j < prefix.size() && prefix[j].quant == prefix[i].quant)
        ++j;
      std::vector<PrefixEntry> block(prefix.begin() + static_cast<std::ptrdiff_t>(i),
                                     prefix.begin() + static_cast<std::ptrdiff_t>(j));
      if (opts.reorder_existential_blocks && block.front().quant == Quant::Exists)
        std::stable_sort(block.begin(), block.end(), [&](const PrefixEntry &a, const PrefixEntry &b) {
          return order.rank(a.var) < order.rank(b.var);
        });
      for (const auto &e : block) {
        slot_[e.var] = schedule_.size();
        schedule_.push_back(e);
      }
      i = j;
    }
  }

  SolveResult go() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult r;
    r.value = body();
    r.stats = std::move(stats_);
    r.stats.trace_lines = lines_.size();
    r.stats.trace_nodes = mgr_->shared_size(lines_);
    for (NodeRef l : lines_)
      r.stats.trace_size += mgr_->size(l);
    if (opts_.emit_trace) {
      ProofTrace t;
      t.num_vars = f_.num_vars();
      t.formula_hash = formula_hash(f_);
      const auto vars = mgr_->order().vars();
      t.order.assign(vars.begin(), vars.end());
      t.lines = std::move(trace_);
      r.trace = std::move(t);
    }
    r.manager = mgr_;
    r.lines = std::move(lines_);
    r.stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

private:
  std::size_t emit(ProofLine l, NodeRef g) {
    if (opts_.emit_trace)
      trace_.push_back(std::move(l));
    lines_.push_back(g);
    if (opts_.record_widths) {
      const std::size_t w = mgr_->complete_width(g);
      stats_.widths.push_back(w);
      stats_.max_width = std::max(stats_.max_width, w);
    }
    return lines_.size();
  }

  /// False once a 0 has been derived.
  bool store(std::size_t line, NodeRef g) {
    if (mgr_->is_zero(g))
      return false;
    if (mgr_->is_one(g))
      return true;
    std::size_t slot = 0;
    for (Var v : mgr_->support(g))
      slot = std::max(slot, slot_[v]);
    buckets_[slot].push_back({line, g, mgr_->size(g)});
    return true;
  }

  bool body() {
    const auto clauses = f_.clauses();
    std::optional<std::size_t> empty_axiom;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const NodeRef g = mgr_->clause(clauses[i]);
      const std::size_t line = emit(ProofLine::axiom(i + 1), g);
      if (mgr_->is_zero(g) && !empty_axiom)
        empty_axiom = line;
    }
    if (empty_axiom) {
      if (*empty_axiom != lines_.size())
        emit(ProofLine::conj(*empty_axiom, *empty_axiom), mgr_->zero());
      return false;
    }
    for (std::size_t i = 0; i < clauses.size(); ++i)
      store(i + 1, lines_[i]);

    const auto &prefix = schedule_;
    for (std::size_t pos = prefix.size(); pos-- > 0;) {
      std::vector<Item> bucket = std::move(buckets_[pos]);
      buckets_[pos].clear();
      if (bucket.empty())
        continue;
      const Var x = prefix[pos].var;
      stats_.eliminations.push_back(x);
      std::stable_sort(bucket.begin(), bucket.end(),
                       [](const Item &a, const Item &b) { return a.size < b.size; });
      std::size_t line = bucket[0].line;
      NodeRef acc = bucket[0].ref;
      for (std::size_t k = 1; k < bucket.size(); ++k) {
        acc = mgr_->conj(acc, bucket[k].ref);
        line = emit(ProofLine::conj(line, bucket[k].line), acc);
        if (mgr_->is_zero(acc))
          return false;
      }
      if (mgr_->depends_on(acc, x)) {
        if (prefix[pos].quant == Quant::Exists) {
          acc = mgr_->exists(acc, x);
          line = emit(ProofLine::proj(x, line), acc);
        } else {
          const NodeRef r0 = mgr_->restrict(acc, x, false);
          const std::size_t l0 = emit(ProofLine::ured(x, false, line), r0);
          if (mgr_->is_zero(r0))
            return false;
          const NodeRef r1 = mgr_->restrict(acc, x, true);
          const std::size_t l1 = emit(ProofLine::ured(x, true, line), r1);
          if (mgr_->is_zero(r1))
            return false;
          acc = mgr_->conj(r0, r1);
          line = emit(ProofLine::conj(l0, l1), acc);
        }
      }
      if (!store(line, acc))
        return false;
      if (opts_.observer) {
        std::vector<NodeRef> live;
        for (const auto &b : buckets_)
          for (const Item &it : b)
            live.push_back(it.ref);
        opts_.observer(x, *mgr_, live);
      }
    }
    return true;
  }

  const Pcnf &f_;
  const SolveOptions &opts_;
  std::shared_ptr<Manager> mgr_;
  std::vector<std::vector<Item>> buckets_;
  std::vector<PrefixEntry> schedule_;   // elimination slots, outermost first
  std::vector<std::size_t> slot_;       // variable -> slot
  std::vector<ProofLine> trace_;
  std::vector<NodeRef> lines_;
  SolveStats stats_;
};

} // namespace

SolveResult solve(const Pcnf &f, const VarOrder &order, const SolveOptions &opts) {
  auto expected = f.prefix_vars();
  std::vector<Var> given(order.vars().begin(), order.vars().end());
  std::sort(expected.begin(), expected.end());
  std::sort(given.begin(), given.end());
  if (given != expected)
    throw OrderError("solver order must be a permutation of the prefix variables");
  return Run(f, order, opts).go();
}

namespace {

std::vector<Var> restricted_order(const Pcnf &f, const PathDecomposition &pd) {
  std::vector<Var> out;
  std::vector<std::uint8_t> seen(f.num_vars() + 1, 0);
  const VarOrder pi = order_from_decomposition(pd);
  for (Var v : pi.vars())
    if (v <= f.num_vars() && f.is_quantified(v) && !seen[v]) {
      seen[v] = 1;
      out.push_back(v);
    }
  for (Var v : f.prefix_vars())
    if (!seen[v])
      out.push_back(v);
  return out;
}

} // namespace

VarOrder decomposition_order(const Pcnf &f, const PathDecomposition &pd) {
  auto forward = restricted_order(f, pd);
  PathDecomposition rev = pd;
  std::reverse(rev.bags.begin(), rev.bags.end());
  auto backward = restricted_order(f, rev);
  if (f.prefix().empty())
    return VarOrder(std::move(forward));
  const Var innermost = f.prefix().back().var;
  const auto rank = [innermost](const std::vector<Var> &o) {
    return std::find(o.begin(), o.end(), innermost) - o.begin();
  };
  if (rank(backward) < rank(forward))
    return VarOrder(std::move(backward));
  return VarOrder(std::move(forward));
}

VarOrder solver_order(const Pcnf &f, OrderPolicy policy) {
  if (policy == OrderPolicy::Prefix)
    return VarOrder(f.prefix_vars());
  return decomposition_order(f, path_decomposition(primal_graph(f)));
}

Pcnf make_family(Family fam, std::size_t n) {
  return fam == Family::QUParity ? gen_quparity(n) : gen_eqprime(n);
}

PathDecomposition family_decomposition(Family fam, std::size_t n) {
  return fam == Family::QUParity ? quparity_decomposition(n) : eqprime_decomposition(n);
}

bool WidthReport::saturated() const {
  for (const auto &p : points)
    if (p.max_width != points.front().max_width)
      return false;
  return true;
}

WidthReport width_probe(Family fam, std::span<const std::size_t> ns, std::size_t node_budget) {
  WidthReport report;
  for (std::size_t n : ns) {
    const Pcnf f = make_family(fam, n);
    SolveOptions opts;
    opts.emit_trace = false;
    opts.node_budget = node_budget;
    const SolveResult r = solve(f, decomposition_order(f, family_decomposition(fam, n)), opts);
    report.points.push_back({n, r.value, r.stats.max_width, r.stats.trace_nodes,
                             r.stats.trace_size, r.stats.wall_time_ms});
  }
  return report;
}

} // namespace qobdd
