#include "qobdd/strategy.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "qobdd/text.hpp"

namespace qobdd {

std::size_t DecisionList::width() const {
  std::size_t w = 0;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    w = std::max(w, manager->complete_width(entries[i].guard));
  return w;
}

std::vector<std::size_t> DecisionList::guard_sizes() const {
  std::vector<std::size_t> out;
  for (const auto &e : entries)
    out.push_back(manager->size(e.guard));
  return out;
}

std::vector<std::size_t> DecisionList::guard_widths() const {
  std::vector<std::size_t> out;
  for (const auto &e : entries)
    out.push_back(manager->complete_width(e.guard));
  return out;
}

std::optional<std::string> DecisionListFamily::audit(const Pcnf &f) const {
  if (!manager)
    return "family has no manager";
  for (const auto &[u, dl] : lists)
    if (!f.is_quantified(u) || !f.is_universal(u))
      return "list for non-universal variable " + std::to_string(u);
  for (Var u : f.universals()) {
    auto it = lists.find(u);
    if (it == lists.end())
      return "no list for universal " + std::to_string(u);
    const DecisionList &dl = it->second;
    if (dl.manager != manager)
      return "list for " + std::to_string(u) + " uses another manager";
    if (dl.entries.empty() || !manager->is_one(dl.entries.back().guard))
      return "list for " + std::to_string(u) + " does not end with the 1-sink";
    for (const auto &e : dl.entries) {
      if (e.guard.manager != manager->id())
        return "guard of " + std::to_string(u) + " belongs to another manager";
      for (Var v : manager->support(e.guard))
        if (!f.is_quantified(v) || f.position(v) >= f.position(u))
          return "guard of " + std::to_string(u) + " depends on " + std::to_string(v);
    }
  }
  return std::nullopt;
}

DecisionListFamily extract(const Pcnf &f, const ProofTrace &t, const Replay &replay) {
  if (!replay.refutation())
    throw StructureError("strategy extraction needs an accepted refutation");
  Manager &mgr = *replay.manager;
  DecisionListFamily fam;
  fam.manager = replay.manager;
  for (Var u : f.universals())
    fam.lists[u].manager = replay.manager;
  for (std::size_t i = 0; i < t.lines.size(); ++i) {
    const ProofLine &l = t.lines[i];
    if (l.rule == Rule::URed)
      fam.lists.at(l.var).entries.push_back({mgr.negate(replay.lines[i]), l.value});
  }
  for (auto &[u, dl] : fam.lists)
    dl.entries.push_back({mgr.one(), true});
  return fam;
}

DecisionListFamily extract(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts) {
  Replay r = replay_trace(f, t, opts);
  if (!r.verdict.accepted)
    throw StructureError(std::string("trace rejected: ") + reason_code(r.verdict.reason));
  return extract(f, t, r);
}

bool eval_list(const DecisionList &dl, std::span<const std::uint8_t> a) {
  for (const auto &e : dl.entries)
    if (dl.manager->evaluate(e.guard, a))
      return e.value;
  throw StructureError("decision list has no firing entry");
}

namespace {

struct Responder {
  Responder(const Pcnf &f, const DecisionListFamily &fam) {
    if (auto bad = fam.audit(f))
      throw StructureError("invalid strategy: " + *bad);
    for (Var u : f.universals())
      order.push_back({u, &fam.lists.at(u)});
    std::sort(order.begin(), order.end(),
              [&](const auto &a, const auto &b) { return f.position(a.first) < f.position(b.first); });
    width = std::max<std::size_t>(f.num_vars(), fam.manager->order().max_var()) + 1;
  }

  void apply(Assignment &a) const {
    for (const auto &[u, dl] : order)
      a[u] = eval_list(*dl, a) ? 1 : 0;
  }

  std::vector<std::pair<Var, const DecisionList *>> order;
  std::size_t width = 0;
};

std::vector<Var> existentials_in_prefix_order(const Pcnf &f) {
  std::vector<Var> out;
  for (const auto &e : f.prefix())
    if (e.quant == Quant::Exists)
      out.push_back(e.var);
  return out;
}

} // namespace

Assignment respond(const Pcnf &f, const DecisionListFamily &fam, std::span<const std::uint8_t> tau) {
  const Responder r(f, fam);
  Assignment a(std::max(r.width, tau.size()), 0);
  std::copy(tau.begin(), tau.end(), a.begin());
  r.apply(a);
  return a;
}

WinningReport verify_winning(const Pcnf &f, const DecisionListFamily &fam, const VerifyOptions &opts) {
  const Responder r(f, fam);
  const std::vector<Var> ex = existentials_in_prefix_order(f);
  WinningReport rep;

  auto fill = [&](Assignment &a, std::uint64_t bits) {
    for (std::size_t i = 0; i < ex.size(); ++i)
      a[ex[i]] = (bits >> i) & 1u;
  };

  if (ex.size() <= opts.exhaustive_limit && ex.size() < 64) {
    rep.exhaustive = true;
    const std::uint64_t total = std::uint64_t{1} << ex.size();
    std::atomic<std::uint64_t> first{std::numeric_limits<std::uint64_t>::max()};
    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(total)));
    auto scan = [&](std::uint64_t lo, std::uint64_t hi) {
      Assignment a(r.width, 0);
      for (std::uint64_t bits = lo; bits < hi && bits < first.load(); ++bits) {
        fill(a, bits);
        r.apply(a);
        if (f.satisfies(a)) {
          std::uint64_t cur = first.load();
          while (bits < cur && !first.compare_exchange_weak(cur, bits)) {
          }
          return;
        }
      }
    };
    if (threads == 1) {
      scan(0, total);
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (total + threads - 1) / threads;
      for (unsigned i = 0; i < threads; ++i)
        pool.emplace_back(scan, i * chunk, std::min(total, (i + 1) * chunk));
      for (auto &th : pool)
        th.join();
    }
    const std::uint64_t hit = first.load();
    if (hit == std::numeric_limits<std::uint64_t>::max()) {
      rep.winning = true;
      rep.checked = total;
    } else {
      Assignment a(r.width, 0);
      fill(a, hit);
      r.apply(a);
      rep.counterexample = std::move(a);
      rep.checked = hit + 1;
    }
    return rep;
  }

  std::mt19937_64 rng(opts.seed);
  std::bernoulli_distribution coin(0.5);
  Assignment a(r.width, 0);
  for (std::uint64_t k = 0; k < opts.samples; ++k) {
    for (Var v : ex)
      a[v] = coin(rng) ? 1 : 0;
    r.apply(a);
    ++rep.checked;
    if (f.satisfies(a)) {
      rep.counterexample = a;
      return rep;
    }
  }
  rep.winning = true;
  return rep;
}

std::uint64_t strategy_range_size(const Pcnf &f, const DecisionListFamily &fam, std::size_t limit) {
  const Responder r(f, fam);
  std::size_t last = 0;
  bool any = false;
  for (const auto &[u, dl] : r.order) {
    last = f.position(u);
    any = true;
  }
  if (!any)
    return 1;
  std::vector<Var> ex;
  for (const auto &e : f.prefix())
    if (e.quant == Quant::Exists && f.position(e.var) < last)
      ex.push_back(e.var);
  if (ex.size() > limit || ex.size() >= 64)
    throw Error("strategy range: " + std::to_string(ex.size()) + " existentials exceed the limit of " +
                std::to_string(limit));
  std::set<std::vector<std::uint8_t>> seen;
  Assignment a(r.width, 0);
  std::vector<std::uint8_t> response(r.order.size());
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << ex.size()); ++bits) {
    for (std::size_t i = 0; i < ex.size(); ++i)
      a[ex[i]] = (bits >> i) & 1u;
    r.apply(a);
    for (std::size_t i = 0; i < r.order.size(); ++i)
      response[i] = a[r.order[i].first];
    seen.insert(response);
  }
  return seen.size();
}

void write_strategy(std::ostream &out, const DecisionListFamily &fam) {
  out << "p qobdd-strategy\n";
  out << 'o';
  for (Var v : fam.manager->order().vars())
    out << ' ' << v;
  out << '\n';
  for (const auto &[u, dl] : fam.lists) {
    out << "u " << u << ' ' << dl.entries.size() << '\n';
    for (const auto &e : dl.entries) {
      out << "entry " << (e.value ? 1 : 0) << '\n';
      write_block(out, *fam.manager, e.guard);
    }
  }
}

std::string strategy_to_string(const DecisionListFamily &fam) {
  std::ostringstream out;
  write_strategy(out, fam);
  return out.str();
}

DecisionListFamily parse_strategy(std::istream &in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line) || split_ws(line) != std::vector<std::string_view>{"p", "qobdd-strategy"})
    throw ParseError(reader.line_no(), "expected 'p qobdd-strategy'");
  if (!reader.next(line))
    throw ParseError(reader.line_no(), "missing order line");
  auto tok = split_ws(line);
  if (tok.empty() || tok[0] != "o")
    throw ParseError(reader.line_no(), "expected 'o <v1> ... <vn>'");
  std::vector<Var> order;
  for (std::size_t i = 1; i < tok.size(); ++i)
    order.push_back(static_cast<Var>(parse_uint(tok[i], reader.line_no())));
  DecisionListFamily fam;
  fam.manager = std::make_shared<Manager>(VarOrder(std::move(order)));

  while (reader.next(line)) {
    tok = split_ws(line);
    if (tok.size() != 3 || tok[0] != "u")
      throw ParseError(reader.line_no(), "expected 'u <var> <s>'");
    const auto u = static_cast<Var>(parse_uint(tok[1], reader.line_no()));
    const std::uint64_t s = parse_uint(tok[2], reader.line_no());
    if (fam.lists.count(u))
      throw ParseError(reader.line_no(), "duplicate list for " + std::to_string(u));
    DecisionList &dl = fam.lists[u];
    dl.manager = fam.manager;
    for (std::uint64_t i = 0; i < s; ++i) {
      if (!reader.next(line))
        throw ParseError(reader.line_no(), "strategy truncated");
      tok = split_ws(line);
      if (tok.size() != 2 || tok[0] != "entry" || (tok[1] != "0" && tok[1] != "1"))
        throw ParseError(reader.line_no(), "expected 'entry <0|1>'");
      const bool value = tok[1] == "1";
      dl.entries.push_back({read_block(reader, *fam.manager), value});
    }
  }
  return fam;
}

DecisionListFamily parse_strategy(const std::string &text) {
  std::istringstream in(text);
  return parse_strategy(in);
}

// Rectangles

namespace {

bool test_bit(const std::vector<std::uint64_t> &bits, std::uint64_t i) {
  return (bits[i >> 6] >> (i & 63)) & 1u;
}

void set_bit(std::vector<std::uint64_t> &bits, std::uint64_t i) {
  bits[i >> 6] |= std::uint64_t{1} << (i & 63);
}

std::vector<std::uint64_t> empty_bits(std::size_t k) {
  return std::vector<std::uint64_t>(((std::uint64_t{1} << k) + 63) / 64, 0);
}

RectangleHalf full_half(const Manager &mgr, std::vector<Var> vars) {
  RectangleHalf h;
  if (vars.size() > RectangleHalf::kExplicitSideLimit) {
    h.obdd = mgr.one();
  } else {
    h.bits = empty_bits(vars.size());
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << vars.size()); ++i)
      set_bit(h.bits, i);
  }
  h.vars = std::move(vars);
  return h;
}

} // namespace

bool RectangleHalf::contains(const Manager *mgr, std::span<const std::uint8_t> side) const {
  if (side.size() != vars.size())
    throw Error("side assignment has " + std::to_string(side.size()) + " values, expected " +
                std::to_string(vars.size()));
  if (obdd) {
    Assignment a(mgr->order().max_var() + 1, 0);
    for (std::size_t i = 0; i < vars.size(); ++i)
      a[vars[i]] = side[i];
    return mgr->evaluate(*obdd, a);
  }
  std::uint64_t row = 0;
  for (std::size_t i = 0; i < side.size(); ++i)
    row |= static_cast<std::uint64_t>(side[i] & 1u) << i;
  return test_bit(bits, row);
}

std::uint64_t RectangleHalf::count() const {
  if (obdd)
    throw Error("model count of an OBDD half");
  std::uint64_t n = 0;
  for (std::uint64_t w : bits)
    n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

bool Rectangle::contains(const Manager *mgr, std::span<const std::uint8_t> a) const {
  return r1.contains(mgr, project(r1.vars, a)) && r2.contains(mgr, project(r2.vars, a));
}

double balance_factor(std::size_t x1, std::size_t x2) {
  if (x1 + x2 == 0)
    return 0;
  return static_cast<double>(std::min(x1, x2)) / static_cast<double>(x1 + x2);
}

std::vector<std::uint8_t> project(std::span<const Var> vars, std::span<const std::uint8_t> a) {
  std::vector<std::uint8_t> out(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i)
    out[i] = a[vars[i]];
  return out;
}

std::vector<Rectangle> obdd_to_rectangles(Manager &mgr, const CompleteObdd &c, std::size_t cut) {
  const std::size_t n = c.order.size();
  if (cut > n)
    throw OrderError("cut " + std::to_string(cut) + " exceeds the order length " + std::to_string(n));
  const std::vector<Var> x1(c.order.begin(), c.order.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::vector<Var> x2(c.order.begin() + static_cast<std::ptrdiff_t>(cut), c.order.end());
  const auto &layer = c.layers[cut];

  auto accepting = [&](std::size_t k) {
    return cut == n ? static_cast<bool>(c.sink_values[k]) : !mgr.is_zero(layer[k].function);
  };

  std::vector<RectangleHalf> r1(layer.size());
  if (x1.size() <= RectangleHalf::kExplicitSideLimit) {
    for (auto &h : r1)
      h.bits = empty_bits(x1.size());
    for (std::uint64_t row = 0; row < (std::uint64_t{1} << x1.size()); ++row) {
      std::uint32_t at = 0;
      for (std::size_t i = 0; i < cut; ++i)
        at = ((row >> i) & 1u) ? c.layers[i][at].hi : c.layers[i][at].lo;
      set_bit(r1[at].bits, row);
    }
  } else {
    std::vector<NodeRef> reach{mgr.one()};
    for (std::size_t i = 0; i < cut; ++i) {
      std::vector<NodeRef> next(c.layers[i + 1].size(), mgr.zero());
      const NodeRef pos = mgr.literal(c.order[i], true);
      const NodeRef neg = mgr.literal(c.order[i], false);
      for (std::size_t k = 0; k < c.layers[i].size(); ++k) {
        const auto &node = c.layers[i][k];
        next[node.lo] = mgr.disj(next[node.lo], mgr.conj(reach[k], neg));
        next[node.hi] = mgr.disj(next[node.hi], mgr.conj(reach[k], pos));
      }
      reach = std::move(next);
    }
    for (std::size_t k = 0; k < layer.size(); ++k)
      r1[k].obdd = reach[k];
  }

  std::vector<Rectangle> out;
  for (std::size_t k = 0; k < layer.size(); ++k) {
    if (!accepting(k))
      continue;
    Rectangle r;
    r.r1 = std::move(r1[k]);
    r.r1.vars = x1;
    r.r2.vars = x2;
    if (x2.size() <= RectangleHalf::kExplicitSideLimit) {
      r.r2.bits = empty_bits(x2.size());
      for (std::uint64_t row = 0; row < (std::uint64_t{1} << x2.size()); ++row) {
        std::uint32_t at = static_cast<std::uint32_t>(k);
        for (std::size_t i = cut; i < n; ++i)
          at = ((row >> (i - cut)) & 1u) ? c.layers[i][at].hi : c.layers[i][at].lo;
        if (c.sink_values[at])
          set_bit(r.r2.bits, row);
      }
    } else {
      r.r2.obdd = layer[k].function;
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool RectangleDecisionList::evaluate(std::span<const std::uint8_t> a) const {
  for (const auto &[r, value] : entries)
    if (r.contains(manager.get(), a))
      return value;
  throw StructureError("rectangle decision list has no firing entry");
}

RectangleDecisionList to_rectangle_list(const DecisionList &dl, std::size_t cut) {
  Manager &mgr = *dl.manager;
  const auto order = mgr.order().vars();
  if (cut > order.size())
    throw OrderError("cut " + std::to_string(cut) + " exceeds the order length " +
                     std::to_string(order.size()));
  if (dl.entries.empty() || !mgr.is_one(dl.entries.back().guard))
    throw StructureError("decision list does not end with the 1-sink");
  RectangleDecisionList out;
  out.manager = dl.manager;
  out.x1.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  out.x2.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  for (std::size_t i = 0; i + 1 < dl.entries.size(); ++i)
    for (Rectangle &r : obdd_to_rectangles(mgr, mgr.complete(dl.entries[i].guard), cut))
      out.entries.emplace_back(std::move(r), dl.entries[i].value);
  out.entries.emplace_back(Rectangle{full_half(mgr, out.x1), full_half(mgr, out.x2)},
                           dl.entries.back().value);
  return out;
}

ProtocolRun and_protocol_run(const RectangleDecisionList &rdl, std::span<const std::uint8_t> a1,
                             std::span<const std::uint8_t> a2) {
  if (a1.size() != rdl.x1.size() || a2.size() != rdl.x2.size())
    throw Error("assignment does not match the partition");
  for (std::size_t i = 0; i < rdl.entries.size(); ++i) {
    const auto &[r, value] = rdl.entries[i];
    const bool b1 = r.r1.contains(rdl.manager.get(), a1);
    const bool b2 = r.r2.contains(rdl.manager.get(), a2);
    if (b1 && b2)
      return {value, i + 1};
  }
  throw StructureError("rectangle decision list has no firing entry");
}

} // namespace qobdd
