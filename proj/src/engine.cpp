#include "oobc/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <deque>
#include <exception>
#include <set>

#include "oobc/codec.hpp"

namespace oobc {

std::string_view entry_reason_name(EntryPoint::Reason r) {
  switch (r) {
    case EntryPoint::Reason::Annotated: return "annotated";
    case EntryPoint::Reason::Lifecycle: return "override-of-lifecycle";
    case EntryPoint::Reason::Explicit: return "explicit-flag";
  }
  return "?";
}

std::vector<std::string> default_lifecycle() {
  return {"onCreate", "onStart", "onResume", "onPause", "onStop", "onDestroy", "onClick", "onReceive"};
}

std::vector<EntryPoint> find_entry_points(const ClassTable& ct, const EntryConfig& config,
                                          std::vector<std::string>* warnings) {
  std::set<MethodId> explicit_ids;
  for (const auto& q : config.explicit_entries) {
    auto m = ct.find_method(q);
    if (!m) throw ConfigError("entry point " + q + " not found");
    explicit_ids.insert(*m);
  }
  std::set<std::string, std::less<>> lifecycle(config.lifecycle.begin(), config.lifecycle.end());
  std::vector<EntryPoint> out;
  // Walk declared classes in source order, then methods in source order.
  for (const ClassDef& cd : ct.program().classes) {
    ClassId cls = *ct.find_class(cd.name);
    for (const MethodDef& md : cd.methods) {
      MethodId m = ct.cls(cls).methods.at(md.name);
      if (explicit_ids.count(m)) {
        out.push_back(EntryPoint{cd.name, md.name, EntryPoint::Reason::Explicit, m});
      } else if (!ct.is_library(cls) && md.is_public() && lifecycle.count(md.name)) {
        out.push_back(EntryPoint{cd.name, md.name, EntryPoint::Reason::Lifecycle, m});
      }
    }
  }
  // Explicit entries on synthesized or builtin methods are not in the program text.
  for (MethodId m : explicit_ids) {
    if (std::none_of(out.begin(), out.end(), [&](const EntryPoint& e) { return e.method == m; })) {
      const MethodInfo& info = ct.method(m);
      out.push_back(EntryPoint{ct.cls(info.owner).name, info.def->name, EntryPoint::Reason::Explicit, m});
    }
  }
  if (out.empty() && warnings) warnings->push_back("no entry points found");
  return out;
}

std::optional<std::size_t> StateGraph::find(const std::string& key) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), key, [](const Node& n, const std::string& k) { return n.key < k; });
  if (it == nodes.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::optional<std::size_t> StateGraph::find_id(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::size_t StateGraph::truncated_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.truncated; }));
}

Store abstract_gc(const Config& c, const Store& s) {
  const auto& map = s.bindings();
  std::set<Addr> live;
  std::set<FramePointer> frames;
  std::set<ObjectPointer> objects;
  std::vector<Addr> work;

  auto reach = [&](const Addr& a) {
    if (map.count(a) && live.insert(a).second) work.push_back(a);
  };
  auto reach_frame = [&](const FramePointer& fp) {
    if (!frames.insert(fp).second) return;
    for (auto it = map.lower_bound(Addr{RegAddr{fp, ""}}); it != map.end(); ++it) {
      auto r = std::get_if<RegAddr>(&it->first);
      if (!r || r->fp != fp) break;
      reach(it->first);
    }
  };
  auto reach_object = [&](const ObjectPointer& op) {
    if (!objects.insert(op).second) return;
    for (auto it = map.lower_bound(Addr{FieldAddr{op, ""}}); it != map.end(); ++it) {
      auto f = std::get_if<FieldAddr>(&it->first);
      if (!f || f->op != op) break;
      reach(it->first);
    }
  };

  reach_frame(c.fp);
  reach(Addr{c.ka});
  while (!work.empty()) {
    Addr a = std::move(work.back());
    work.pop_back();
    for (const Atom& v : s.lookup(a)) {
      if (auto obj = std::get_if<atom::Object>(&v)) {
        reach_object(obj->ptr);
      } else if (auto f = std::get_if<atom::Fun>(&v)) {
        reach_frame(f->fp);
        reach(Addr{f->next});
      }
    }
  }
  Store out;
  for (const Addr& a : live) out.join_at(a, s.lookup(a));
  return out;
}

namespace {

void normalize_events(std::vector<AnalysisEvent>& events) {
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
}

bool truncates(const ClassTable& ct, const ExploreOptions& options, const Config& c,
               const std::vector<AnalysisEvent>& events) {
  if (!options.predicates || options.predicates->empty()) return false;
  return evaluate(*options.predicates, ct, StateView{c, events}).truncated;
}

int thread_count(const ExploreOptions& options) {
  return options.workers > 0 ? options.workers : omp_get_max_threads();
}

// Runs f(i) for i in [0, n) on the configured number of threads and
// rethrows the first failure afterwards.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1 && n > 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Node table under construction; keys are unique.
struct GraphBuilder {
  const ClassTable& ct;
  bool per_state_store;
  std::vector<Node> nodes;
  std::set<Edge> edges;
  std::map<std::string, std::size_t> index;

  std::string key_for(const Config& c, const Store* store) const {
    std::string key = config_key(ct, c);
    if (per_state_store) key += "|" + store_digest(ct, *store);
    return key;
  }

  // Returns the node index and whether it is new. Digest collisions between
  // different stores get a numbered key.
  std::pair<std::size_t, bool> add(std::string key, const Config& c, std::shared_ptr<const Store> store) {
    for (int n = 0;; ++n) {
      std::string candidate = n == 0 ? key : key + "#" + std::to_string(n);
      auto it = index.find(candidate);
      if (it == index.end()) {
        key = std::move(candidate);
        break;
      }
      if (!per_state_store || *nodes[it->second].store == *store) return {it->second, false};
    }
    index.emplace(key, nodes.size());
    Node node;
    node.key = key;
    node.config = c;
    node.store = std::move(store);
    nodes.push_back(std::move(node));
    return {nodes.size() - 1, true};
  }

  void sort_by_key(std::vector<std::size_t>& ids) const {
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return nodes[a].key < nodes[b].key; });
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }

  StateGraph finish() {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    sort_by_key(order);
    std::vector<std::size_t> rank(nodes.size());
    StateGraph g;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < order.size(); ++i) {
      rank[order[i]] = i;
      Node n = std::move(nodes[order[i]]);
      std::string id = "s" + hex64(fnv1a64(n.key));
      for (int k = 1; ids.count(id); ++k) id = "s" + hex64(fnv1a64(n.key)) + "-" + std::to_string(k);
      ids.insert(id);
      n.id = id;
      g.nodes.push_back(std::move(n));
    }
    for (const auto& e : edges) g.edges.push_back(Edge{rank[e.from], rank[e.to], e.rule});
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }
};

struct Stepped {
  Transition t;
  bool truncated = false;
  // Per-state mode: materialized successor stores and keys.
  std::vector<std::shared_ptr<const Store>> stores;
  std::vector<std::string> keys;
};

Stepped step_node(const ClassTable& ct, const ExploreOptions& options, const Config& c, const Store& store) {
  Stepped out;
  out.t = transition(ct, c, store, options.policy);
  normalize_events(out.t.events);
  if (truncates(ct, options, c, out.t.events)) {
    out.truncated = true;
    out.t.successors.clear();
  }
  return out;
}

void materialize(const ExploreOptions& options, const GraphBuilder& b, const Store& pred, Stepped& s) {
  for (auto& succ : s.t.successors) {
    Store next = pred;
    apply_delta(next, succ.delta);
    if (options.gc) next = abstract_gc(succ.config, next);
    auto ptr = std::make_shared<const Store>(std::move(next));
    s.keys.push_back(b.key_for(succ.config, ptr.get()));
    s.stores.push_back(std::move(ptr));
  }
}

void record_step(Node& n, Stepped& s) {
  ++n.visits;
  n.events = std::move(s.t.events);
  n.truncated = s.truncated;
}

Store join_node_stores(const StateGraph& g) {
  Store out;
  for (const auto& n : g.nodes) out.join(*n.store);
  return out;
}

ExploreResult explore_widened(const ClassTable& ct, MethodId entry, const Store& initial,
                              const ExploreOptions& options) {
  GraphBuilder b{ct, false, {}, {}, {}};
  Store sigma = initial;
  AbstractState s0 = entry_state(ct, entry);
  sigma.join(s0.sigma());
  auto [root, fresh] = b.add(b.key_for(s0.config, nullptr), s0.config, nullptr);
  (void)fresh;
  b.nodes[root].root = true;

  ExploreResult r;
  std::vector<std::size_t> dirty{root};
  int threads = thread_count(options);
  while (!dirty.empty() && !r.cutoff_hit) {
    b.sort_by_key(dirty);
    std::vector<Stepped> results(dirty.size());
    parallel_for(dirty.size(), threads,
                 [&](std::size_t i) { results[i] = step_node(ct, options, b.nodes[dirty[i]].config, sigma); });

    bool grew = false;
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < dirty.size(); ++i) {
      if (options.cutoff && r.steps >= *options.cutoff) {
        r.cutoff_hit = true;
        break;
      }
      ++r.steps;
      std::size_t from = dirty[i];
      record_step(b.nodes[from], results[i]);
      for (auto& succ : results[i].t.successors) {
        grew |= apply_delta_changed(sigma, succ.delta);
        auto [to, inserted] = b.add(b.key_for(succ.config, nullptr), succ.config, nullptr);
        if (inserted) next.push_back(to);
        b.edges.insert(Edge{from, to, succ.rule});
      }
    }
    if (grew) {
      // Everything stepped so far may read what just changed.
      next.resize(b.nodes.size());
      for (std::size_t i = 0; i < next.size(); ++i) next[i] = i;
    }
    dirty = std::move(next);
  }
  auto shared = std::make_shared<const Store>(sigma);
  for (auto& n : b.nodes) n.store = shared;
  r.graph = b.finish();
  r.store = std::move(sigma);
  r.truncated = r.graph.truncated_count() > 0;
  return r;
}

ExploreResult explore_states(const ClassTable& ct, MethodId entry, const Store& initial,
                             const ExploreOptions& options) {
  GraphBuilder b{ct, true, {}, {}, {}};
  AbstractState s0 = entry_state(ct, entry);
  Store store0 = join(initial, s0.sigma());
  if (options.gc) store0 = abstract_gc(s0.config, store0);
  auto ptr0 = std::make_shared<const Store>(std::move(store0));
  auto [root, fresh] = b.add(b.key_for(s0.config, ptr0.get()), s0.config, ptr0);
  (void)fresh;
  b.nodes[root].root = true;

  ExploreResult r;
  std::vector<std::size_t> frontier{root};
  int threads = thread_count(options);
  while (!frontier.empty() && !r.cutoff_hit) {
    b.sort_by_key(frontier);
    std::vector<Stepped> results(frontier.size());
    parallel_for(frontier.size(), threads, [&](std::size_t i) {
      const Node& n = b.nodes[frontier[i]];
      results[i] = step_node(ct, options, n.config, *n.store);
      materialize(options, b, *n.store, results[i]);
    });

    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (options.cutoff && r.steps >= *options.cutoff) {
        r.cutoff_hit = true;
        break;
      }
      ++r.steps;
      std::size_t from = frontier[i];
      Stepped& s = results[i];
      for (std::size_t j = 0; j < s.t.successors.size(); ++j) {
        auto [to, inserted] = b.add(s.keys[j], s.t.successors[j].config, s.stores[j]);
        if (inserted) next.push_back(to);
        b.edges.insert(Edge{from, to, s.t.successors[j].rule});
      }
      record_step(b.nodes[from], s);
    }
    frontier = std::move(next);
  }
  r.graph = b.finish();
  r.store = join_node_stores(r.graph);
  r.truncated = r.graph.truncated_count() > 0;
  return r;
}

}  // namespace

ExploreResult explore(const ClassTable& ct, MethodId entry, const Store& initial, const ExploreOptions& options) {
  if (options.reference) return explore_serial(ct, entry, initial, options);
  return options.widen ? explore_widened(ct, entry, initial, options) : explore_states(ct, entry, initial, options);
}

ExploreResult explore_serial(const ClassTable& ct, MethodId entry, const Store& initial,
                             const ExploreOptions& options) {
  GraphBuilder b{ct, !options.widen, {}, {}, {}};
  AbstractState s0 = entry_state(ct, entry);
  Store sigma = join(initial, s0.sigma());
  std::shared_ptr<const Store> ptr0;
  if (!options.widen) {
    ptr0 = std::make_shared<const Store>(options.gc ? abstract_gc(s0.config, sigma) : sigma);
  }
  std::size_t root = b.add(b.key_for(s0.config, ptr0.get()), s0.config, ptr0).first;
  b.nodes[root].root = true;

  ExploreResult r;
  std::deque<std::size_t> work{root};
  std::vector<bool> queued{true};
  while (!work.empty()) {
    if (options.cutoff && r.steps >= *options.cutoff) {
      r.cutoff_hit = true;
      break;
    }
    std::size_t from = work.front();
    work.pop_front();
    queued[from] = false;
    ++r.steps;
    const Store& here = options.widen ? sigma : *b.nodes[from].store;
    Stepped s = step_node(ct, options, b.nodes[from].config, here);
    if (!options.widen) materialize(options, b, here, s);
    bool grew = false;
    for (std::size_t j = 0; j < s.t.successors.size(); ++j) {
      auto& succ = s.t.successors[j];
      std::pair<std::size_t, bool> added;
      if (options.widen) {
        grew |= apply_delta_changed(sigma, succ.delta);
        added = b.add(b.key_for(succ.config, nullptr), succ.config, nullptr);
      } else {
        added = b.add(s.keys[j], succ.config, s.stores[j]);
      }
      queued.resize(b.nodes.size(), false);
      if (added.second) {
        work.push_back(added.first);
        queued[added.first] = true;
      }
      b.edges.insert(Edge{from, added.first, succ.rule});
    }
    record_step(b.nodes[from], s);
    if (grew) {
      for (std::size_t i = 0; i < b.nodes.size(); ++i) {
        if (!queued[i]) {
          work.push_back(i);
          queued[i] = true;
        }
      }
    }
  }
  if (options.widen) {
    auto shared = std::make_shared<const Store>(sigma);
    for (auto& n : b.nodes) n.store = shared;
  }
  r.graph = b.finish();
  r.store = options.widen ? std::move(sigma) : join_node_stores(r.graph);
  r.truncated = r.graph.truncated_count() > 0;
  return r;
}

namespace {

void merge_graph(GraphBuilder& b, const StateGraph& g) {
  std::vector<std::size_t> map(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    auto [idx, inserted] = b.add(n.key, n.config, n.store);
    Node& into = b.nodes[idx];
    if (inserted) {
      into.events = n.events;
    } else {
      into.events.insert(into.events.end(), n.events.begin(), n.events.end());
      normalize_events(into.events);
    }
    into.root |= n.root;
    into.truncated |= n.truncated;
    into.visits += n.visits;
    map[i] = idx;
  }
  for (const auto& e : g.edges) b.edges.insert(Edge{map[e.from], map[e.to], e.rule});
}

}  // namespace

AnalysisResult analyze_all_entries(const ClassTable& ct, const std::vector<EntryPoint>& entries,
                                   const ExploreOptions& options) {
  AnalysisResult out;
  out.ct = &ct;
  out.options = options;
  out.entries = entries;
  if (entries.empty()) {
    out.warnings.push_back("no entry points; the state graph is empty");
    return out;
  }
  Store sigma;
  std::vector<ExploreResult> last;
  while (true) {
    Store before = sigma;
    last.clear();
    for (const auto& e : entries) {
      ExploreResult r = explore(ct, e.method, sigma, options);
      sigma.join(r.store);
      out.steps += r.steps;
      out.cutoff_hit |= r.cutoff_hit;
      out.truncated |= r.truncated;
      last.push_back(std::move(r));
    }
    ++out.passes;
    // A lone entry's exploration is already closed; another pass would only
    // restart it from its own final store.
    if (options.single_pass || entries.size() == 1 || sigma == before) break;
  }
  // The final pass ran against the stable store; its graphs are the result.
  GraphBuilder b{ct, !options.widen, {}, {}, {}};
  for (const auto& r : last) merge_graph(b, r.graph);
  out.graph = b.finish();
  out.store = std::move(sigma);
  return out;
}

}  // namespace oobc
