#include "cicdor/discovery/fci.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cicdor::discovery {

Pag::Pag(std::size_t n) : n_(n), marks_(n * n, Mark::None) {}

void Pag::add_edge(std::size_t i, std::size_t j, Mark at_i, Mark at_j) {
  set_mark(j, i, at_i);
  set_mark(i, j, at_j);
}

void Pag::remove_edge(std::size_t i, std::size_t j) {
  set_mark(i, j, Mark::None);
  set_mark(j, i, Mark::None);
}

std::vector<std::size_t> Pag::adjacents(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (j != i && adjacent(i, j)) out.push_back(j);
  return out;
}

std::string Pag::describe(const std::vector<std::string>& names) const {
  auto left = [](Mark m) { return m == Mark::Arrow ? "<" : m == Mark::Circle ? "o" : "-"; };
  auto right = [](Mark m) { return m == Mark::Arrow ? ">" : m == Mark::Circle ? "o" : "-"; };
  std::ostringstream os;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (!adjacent(i, j)) continue;
      os << names.at(i) << ' ' << left(mark(j, i)) << '-' << right(mark(i, j)) << ' ' << names.at(j) << '\n';
    }
  }
  return os.str();
}

namespace {

using Sepsets = std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>>;

std::pair<std::size_t, std::size_t> key(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

// Calls f on every size-l subset of items until f returns true.
bool for_each_subset(const std::vector<std::size_t>& items, std::size_t l,
                     const std::function<bool(const std::vector<std::size_t>&)>& f) {
  if (l > items.size()) return false;
  std::vector<std::size_t> idx(l);
  for (std::size_t i = 0; i < l; ++i) idx[i] = i;
  std::vector<std::size_t> subset(l);
  while (true) {
    for (std::size_t i = 0; i < l; ++i) subset[i] = items[idx[i]];
    if (f(subset)) return true;
    std::size_t i = l;
    while (i > 0 && idx[i - 1] == items.size() - l + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < l; ++j) idx[j] = idx[j - 1] + 1;
  }
}

class Search {
 public:
  Search(const DiscreteTable& t, const FciOptions& o) : t_(t), o_(o), g_(t.cols()) {}

  FciResult run() {
    const std::size_t n = t_.cols();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) g_.add_edge(i, j, Mark::Circle, Mark::Circle);
    skeleton();
    orient_colliders();
    if (o_.possible_dsep) {
      possible_dsep_prune();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (g_.adjacent(i, j)) g_.add_edge(i, j, Mark::Circle, Mark::Circle);
      orient_colliders();
    }
    bool changed = true;
    while (changed) {
      changed = false;
      changed |= rule1();
      changed |= rule2();
      changed |= rule3();
      changed |= rule4();
      changed |= rule8();
      changed |= rule9();
      changed |= rule10();
    }
    return {g_, tests_, degenerate_};
  }

 private:
  bool independent(std::size_t x, std::size_t y, const std::vector<std::size_t>& z) {
    ++tests_;
    const auto r = g2_test(t_, x, y, z, o_.alpha);
    if (r.degenerate) ++degenerate_;
    return r.independent;
  }

  bool in_sepset(std::size_t a, std::size_t c, std::size_t b) const {
    const auto it = sep_.find(key(a, c));
    return it != sep_.end() && std::find(it->second.begin(), it->second.end(), b) != it->second.end();
  }

  void skeleton() {
    const std::size_t n = t_.cols();
    for (std::size_t l = 0;; ++l) {
      std::vector<std::vector<std::size_t>> adj(n);
      for (std::size_t x = 0; x < n; ++x) adj[x] = g_.adjacents(x);
      bool any = false;
      for (std::size_t x = 0; x < n; ++x) {
        for (const std::size_t y : adj[x]) {
          if (!g_.adjacent(x, y)) continue;
          std::vector<std::size_t> cand;
          for (const std::size_t v : adj[x])
            if (v != y) cand.push_back(v);
          if (cand.size() < l) continue;
          any = true;
          for_each_subset(cand, l, [&](const std::vector<std::size_t>& s) {
            if (!independent(x, y, s)) return false;
            g_.remove_edge(x, y);
            sep_[key(x, y)] = s;
            return true;
          });
        }
      }
      if (!any || l >= o_.max_condition) break;
    }
  }

  void orient_colliders() {
    const std::size_t n = g_.size();
    for (std::size_t b = 0; b < n; ++b) {
      const auto adj = g_.adjacents(b);
      for (std::size_t i = 0; i < adj.size(); ++i) {
        for (std::size_t j = i + 1; j < adj.size(); ++j) {
          const std::size_t a = adj[i], c = adj[j];
          if (g_.adjacent(a, c) || in_sepset(a, c, b)) continue;
          g_.set_mark(a, b, Mark::Arrow);
          g_.set_mark(c, b, Mark::Arrow);
        }
      }
    }
  }

  std::vector<std::size_t> possible_dsep(std::size_t x) const {
    std::set<std::size_t> out;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<std::pair<std::size_t, std::size_t>> frontier;
    for (const std::size_t b : g_.adjacents(x)) {
      frontier.emplace_back(x, b);
      seen.emplace(x, b);
      out.insert(b);
    }
    while (!frontier.empty()) {
      const auto [prev, cur] = frontier.back();
      frontier.pop_back();
      for (const std::size_t next : g_.adjacents(cur)) {
        if (next == prev || next == x) continue;
        const bool collider = g_.mark(prev, cur) == Mark::Arrow && g_.mark(next, cur) == Mark::Arrow;
        const bool triangle = g_.adjacent(prev, next);
        if (!collider && !triangle) continue;
        if (!seen.emplace(cur, next).second) continue;
        out.insert(next);
        frontier.emplace_back(cur, next);
      }
    }
    return {out.begin(), out.end()};
  }

  void possible_dsep_prune() {
    const std::size_t n = g_.size();
    std::vector<std::vector<std::size_t>> pds(n);
    for (std::size_t x = 0; x < n; ++x) pds[x] = possible_dsep(x);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = x + 1; y < n; ++y) {
        if (!g_.adjacent(x, y)) continue;
        for (const auto* set : {&pds[x], &pds[y]}) {
          std::vector<std::size_t> cand;
          for (const std::size_t v : *set)
            if (v != x && v != y) cand.push_back(v);
          bool removed = false;
          for (std::size_t l = 1; l <= std::min(o_.max_condition, cand.size()) && !removed; ++l) {
            removed = for_each_subset(cand, l, [&](const std::vector<std::size_t>& s) {
              if (!independent(x, y, s)) return false;
              g_.remove_edge(x, y);
              sep_[key(x, y)] = s;
              return true;
            });
          }
          if (removed) break;
        }
      }
    }
  }

  bool directed(std::size_t a, std::size_t b) const {
    return g_.mark(a, b) == Mark::Arrow && g_.mark(b, a) == Mark::Tail;
  }

  // a *-> b could be a directed edge a -> b in some member of the class.
  bool potentially_directed(std::size_t a, std::size_t b) const {
    return g_.adjacent(a, b) && g_.mark(b, a) != Mark::Arrow && g_.mark(a, b) != Mark::Tail;
  }

  bool set(std::size_t i, std::size_t j, Mark m) {
    if (g_.mark(i, j) == m) return false;
    g_.set_mark(i, j, m);
    return true;
  }

  // R1: a *-> b o-* c, a and c not adjacent => b -> c.
  bool rule1() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t b = 0; b < n; ++b) {
      for (const std::size_t a : g_.adjacents(b)) {
        if (g_.mark(a, b) != Mark::Arrow) continue;
        for (const std::size_t c : g_.adjacents(b)) {
          if (c == a || g_.adjacent(a, c) || g_.mark(c, b) != Mark::Circle) continue;
          changed |= set(c, b, Mark::Tail);
          changed |= set(b, c, Mark::Arrow);
        }
      }
    }
    return changed;
  }

  // R2: a -> b *-> c or a *-> b -> c, with a *-o c => a *-> c.
  bool rule2() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (const std::size_t c : g_.adjacents(a)) {
        if (g_.mark(a, c) != Mark::Circle) continue;
        for (const std::size_t b : g_.adjacents(a)) {
          if (b == c || !g_.adjacent(b, c)) continue;
          const bool first = directed(a, b) && g_.mark(b, c) == Mark::Arrow;
          const bool second = g_.mark(a, b) == Mark::Arrow && directed(b, c);
          if (first || second) {
            changed |= set(a, c, Mark::Arrow);
            break;
          }
        }
      }
    }
    return changed;
  }

  // R3: a *-> b <-* c, a *-o t o-* c, a and c not adjacent, t *-o b => t *-> b.
  bool rule3() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t b = 0; b < n; ++b) {
      const auto adj = g_.adjacents(b);
      for (const std::size_t t : adj) {
        if (g_.mark(t, b) != Mark::Circle) continue;
        bool fire = false;
        for (std::size_t i = 0; i < adj.size() && !fire; ++i) {
          for (std::size_t j = i + 1; j < adj.size() && !fire; ++j) {
            const std::size_t a = adj[i], c = adj[j];
            if (a == t || c == t || g_.adjacent(a, c)) continue;
            if (g_.mark(a, b) != Mark::Arrow || g_.mark(c, b) != Mark::Arrow) continue;
            if (!g_.adjacent(a, t) || !g_.adjacent(c, t)) continue;
            fire = g_.mark(a, t) == Mark::Circle && g_.mark(c, t) == Mark::Circle;
          }
        }
        if (fire) changed |= set(t, b, Mark::Arrow);
      }
    }
    return changed;
  }

  // R4 on discriminating paths <t, ..., a, b, c> for b with b o-* c.
  bool rule4() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t b = 0; b < n; ++b) {
      for (const std::size_t c : g_.adjacents(b)) {
        if (g_.mark(c, b) != Mark::Circle) continue;
        for (const std::size_t a : g_.adjacents(b)) {
          if (a == c || !directed(a, c) || g_.mark(b, a) != Mark::Arrow) continue;
          std::vector<std::size_t> path{b, a};
          if (const auto end = discriminating_end(path, c)) {
            if (in_sepset(*end, c, b)) {
              changed |= set(c, b, Mark::Tail);
              changed |= set(b, c, Mark::Arrow);
            } else {
              changed |= set(a, b, Mark::Arrow);
              changed |= set(b, a, Mark::Arrow);
              changed |= set(b, c, Mark::Arrow);
              changed |= set(c, b, Mark::Arrow);
            }
            break;
          }
        }
      }
    }
    return changed;
  }

  // path = <b, a, ...> walking away from b; the last node is a collider that
  // is a parent of c. Returns the discriminating endpoint if one is reachable.
  std::optional<std::size_t> discriminating_end(std::vector<std::size_t>& path, std::size_t c) const {
    const std::size_t last = path.back();
    for (const std::size_t t : g_.adjacents(last)) {
      if (t == c || std::find(path.begin(), path.end(), t) != path.end()) continue;
      if (g_.mark(t, last) != Mark::Arrow) continue;  // last must be a collider on the path
      if (!g_.adjacent(t, c)) return t;
      if (directed(t, c) && g_.mark(last, t) == Mark::Arrow) {
        path.push_back(t);
        if (const auto end = discriminating_end(path, c)) return end;
        path.pop_back();
      }
    }
    return std::nullopt;
  }

  // R8: a -> b -> c or a -o b -> c, with a o-> c => a -> c.
  bool rule8() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (const std::size_t c : g_.adjacents(a)) {
        if (g_.mark(a, c) != Mark::Arrow || g_.mark(c, a) != Mark::Circle) continue;
        for (const std::size_t b : g_.adjacents(a)) {
          if (b == c || !directed(b, c)) continue;
          const bool ab = g_.mark(b, a) == Mark::Tail &&
                          (g_.mark(a, b) == Mark::Arrow || g_.mark(a, b) == Mark::Circle);
          if (ab) {
            changed |= set(c, a, Mark::Tail);
            break;
          }
        }
      }
    }
    return changed;
  }

  // Every first step after `from` of an uncovered potentially directed path
  // from `from` to `to`.
  std::set<std::size_t> first_steps(std::size_t from, std::size_t to, std::size_t banned) const {
    std::set<std::size_t> out;
    for (const std::size_t b : g_.adjacents(from)) {
      if (b == banned || !potentially_directed(from, b)) continue;
      if (b == to) {
        out.insert(b);
        continue;
      }
      std::vector<std::size_t> path{from, b};
      if (reaches(path, to, banned)) out.insert(b);
    }
    return out;
  }

  bool reaches(std::vector<std::size_t>& path, std::size_t to, std::size_t banned) const {
    const std::size_t prev = path[path.size() - 2];
    const std::size_t cur = path.back();
    for (const std::size_t next : g_.adjacents(cur)) {
      if (next == banned || std::find(path.begin(), path.end(), next) != path.end()) continue;
      if (!potentially_directed(cur, next) || g_.adjacent(prev, next)) continue;
      if (next == to) return true;
      path.push_back(next);
      if (reaches(path, to, banned)) return true;
      path.pop_back();
    }
    return false;
  }

  // R9: a o-> c with an uncovered p.d. path <a, b, ..., c>, b and c not adjacent => a -> c.
  bool rule9() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (const std::size_t c : g_.adjacents(a)) {
        if (g_.mark(a, c) != Mark::Arrow || g_.mark(c, a) != Mark::Circle) continue;
        for (const std::size_t b : g_.adjacents(a)) {
          if (b == c || g_.adjacent(b, c) || !potentially_directed(a, b)) continue;
          std::vector<std::size_t> path{a, b};
          if (reaches(path, c, n)) {
            changed |= set(c, a, Mark::Tail);
            break;
          }
        }
      }
    }
    return changed;
  }

  // R10: a o-> c, b -> c <- t, uncovered p.d. paths from a to b and to t whose
  // first steps m, w differ and are not adjacent => a -> c.
  bool rule10() {
    bool changed = false;
    const std::size_t n = g_.size();
    for (std::size_t a = 0; a < n; ++a) {
      for (const std::size_t c : g_.adjacents(a)) {
        if (g_.mark(a, c) != Mark::Arrow || g_.mark(c, a) != Mark::Circle) continue;
        std::vector<std::size_t> parents;
        for (const std::size_t p : g_.adjacents(c))
          if (p != a && directed(p, c)) parents.push_back(p);
        bool fire = false;
        for (std::size_t i = 0; i < parents.size() && !fire; ++i) {
          for (std::size_t j = i + 1; j < parents.size() && !fire; ++j) {
            const auto m1 = first_steps(a, parents[i], c);
            const auto m2 = first_steps(a, parents[j], c);
            for (const std::size_t u : m1) {
              for (const std::size_t w : m2) {
                if (u != w && !g_.adjacent(u, w)) fire = true;
              }
            }
          }
        }
        if (fire) changed |= set(c, a, Mark::Tail);
      }
    }
    return changed;
  }

  const DiscreteTable& t_;
  FciOptions o_;
  Pag g_;
  Sepsets sep_;
  std::size_t tests_ = 0;
  std::size_t degenerate_ = 0;
};

}  // namespace

FciResult fci_discover(const DiscreteTable& table, const FciOptions& options) {
  if (table.cols() < 2) throw std::invalid_argument("fci_discover: need at least two variables");
  return Search(table, options).run();
}

std::vector<std::size_t> markov_blanket(const Pag& g, std::size_t y) {
  std::set<std::size_t> mb;
  for (const std::size_t c : g.adjacents(y)) {
    mb.insert(c);
    if (g.mark(y, c) != Mark::Arrow) continue;
    for (const std::size_t s : g.adjacents(c))
      if (s != y && g.mark(s, c) == Mark::Arrow) mb.insert(s);
  }
  return {mb.begin(), mb.end()};
}

}  // namespace cicdor::discovery
