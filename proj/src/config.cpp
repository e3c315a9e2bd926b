#include "chpctl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace chpctl {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config parse error (line " + std::to_string(line) + "): " + msg);
}

double parse_double(const std::string& tok, int line) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') fail(line, "not a number: '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, int line) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') fail(line, "not an integer: '" + tok + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& tok, int line) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  fail(line, "not a boolean: '" + tok + "'");
}

// Record lines look like:  bus = id=1 M=5 D=1 Tg=2 Kp=20 V=1 ref=true
std::map<std::string, std::string> parse_record(const std::string& rest, int line) {
  std::map<std::string, std::string> out;
  std::istringstream iss(rest);
  std::string tok;
  while (iss >> tok) {
    size_t eq = tok.find('=');
    if (eq == std::string::npos) fail(line, "expected field=value, got '" + tok + "'");
    std::string key = tok.substr(0, eq);
    if (out.count(key)) fail(line, "duplicate field '" + key + "'");
    out[key] = tok.substr(eq + 1);
  }
  return out;
}

std::string require(std::map<std::string, std::string>& rec, const std::string& key, int line) {
  auto it = rec.find(key);
  if (it == rec.end()) fail(line, "missing field '" + key + "'");
  std::string v = it->second;
  rec.erase(it);
  return v;
}

void expect_empty(const std::map<std::string, std::string>& rec, int line) {
  if (!rec.empty()) fail(line, "unknown field '" + rec.begin()->first + "'");
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig cfg;
  cfg.costs.source_cost.clear();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (section == "meta") {
      if (key == "name") cfg.name = val;
      else fail(line, "unknown meta key '" + key + "'");
    } else if (section == "constants") {
      if (key == "rho") cfg.constants.rho = parse_double(val, line);
      else if (key == "cp") cfg.constants.cp = parse_double(val, line);
      else if (key == "agc_gain") cfg.constants.agc_gain = parse_double(val, line);
      else fail(line, "unknown constants key '" + key + "'");
    } else if (section == "weights") {
      if (key == "cutoff") cfg.weights.cutoff = parse_double(val, line);
      else if (key == "alpha") cfg.weights.alpha = parse_double(val, line);
      else if (key == "epsilon_rel") cfg.weights.epsilon_rel = parse_double(val, line);
      else if (key == "rho_min") cfg.weights.rho_min = parse_double(val, line);
      else if (key == "rho_max") cfg.weights.rho_max = parse_double(val, line);
      else if (key == "x_cap") cfg.weights.x_cap = parse_double(val, line);
      else if (key == "y_cap") cfg.weights.y_cap = parse_double(val, line);
      else fail(line, "unknown weights key '" + key + "'");
    } else if (section == "costs") {
      if (key == "source") {
        auto rec = parse_record(val, line);
        int edge = parse_int(require(rec, "edge", line), line);
        double f = parse_double(require(rec, "f", line), line);
        expect_empty(rec, line);
        if (cfg.costs.source_cost.count(edge)) fail(line, "duplicate source cost for edge " + std::to_string(edge));
        cfg.costs.source_cost[edge] = f;
      } else if (key == "temp_penalty") {
        cfg.costs.temp_penalty_default = parse_double(val, line);
      } else if (key == "penalty") {
        auto rec = parse_record(val, line);
        double v = parse_double(require(rec, "value", line), line);
        if (rec.count("edge")) {
          cfg.costs.edge_penalty[parse_int(require(rec, "edge", line), line)] = v;
        } else if (rec.count("node")) {
          cfg.costs.node_penalty[parse_int(require(rec, "node", line), line)] = v;
        } else {
          fail(line, "penalty needs edge= or node=");
        }
        expect_empty(rec, line);
      } else {
        fail(line, "unknown costs key '" + key + "'");
      }
    } else if (section == "eps") {
      if (key == "bus") {
        auto rec = parse_record(val, line);
        EpsBusSpec b;
        b.id = parse_int(require(rec, "id", line), line);
        b.inertia = parse_double(require(rec, "M", line), line);
        b.damping = parse_double(require(rec, "D", line), line);
        b.gov_time = parse_double(require(rec, "Tg", line), line);
        b.droop = parse_double(require(rec, "Kp", line), line);
        b.voltage = parse_double(require(rec, "V", line), line);
        if (rec.count("ref")) b.is_reference = parse_bool(require(rec, "ref", line), line);
        expect_empty(rec, line);
        cfg.buses.push_back(b);
      } else if (key == "line") {
        auto rec = parse_record(val, line);
        EpsLineSpec l;
        l.from = parse_int(require(rec, "from", line), line);
        l.to = parse_int(require(rec, "to", line), line);
        l.susceptance = parse_double(require(rec, "b", line), line);
        expect_empty(rec, line);
        cfg.lines.push_back(l);
      } else {
        fail(line, "unknown eps key '" + key + "'");
      }
    } else if (section == "dhs") {
      if (key == "edge") {
        auto rec = parse_record(val, line);
        DhsEdgeSpec e;
        e.id = parse_int(require(rec, "id", line), line);
        std::string kind = require(rec, "kind", line);
        if (kind == "source") e.kind = EdgeKind::Source;
        else if (kind == "heatpump") e.kind = EdgeKind::HeatPump;
        else if (kind == "load") e.kind = EdgeKind::Load;
        else fail(line, "unknown edge kind '" + kind + "'");
        e.volume = parse_double(require(rec, "V", line), line);
        e.flow = parse_double(require(rec, "q", line), line);
        e.upstream_node = parse_int(require(rec, "from", line), line);
        e.into_node = parse_int(require(rec, "into", line), line);
        expect_empty(rec, line);
        cfg.edges.push_back(e);
      } else if (key == "node") {
        auto rec = parse_record(val, line);
        DhsNodeSpec n;
        n.id = parse_int(require(rec, "id", line), line);
        n.volume = parse_double(require(rec, "V", line), line);
        expect_empty(rec, line);
        cfg.nodes.push_back(n);
      } else {
        fail(line, "unknown dhs key '" + key + "'");
      }
    } else if (section == "hps") {
      if (key == "hp") {
        auto rec = parse_record(val, line);
        HpCouplingSpec h;
        h.id = parse_int(require(rec, "id", line), line);
        h.eps_bus = parse_int(require(rec, "bus", line), line);
        h.dhs_edge = parse_int(require(rec, "edge", line), line);
        h.cop = parse_double(require(rec, "cop", line), line);
        h.gain_e = parse_double(require(rec, "gamma_e", line), line);
        h.gain_h = parse_double(require(rec, "gamma_h", line), line);
        expect_empty(rec, line);
        cfg.hps.push_back(h);
      } else {
        fail(line, "unknown hps key '" + key + "'");
      }
    } else if (section.empty()) {
      fail(line, "key outside any [section]");
    } else {
      fail(line, "unknown section '" + section + "'");
    }
  }
  validate(cfg);
  return cfg;
}

std::string serialize_config(const SystemConfig& cfg) {
  std::ostringstream os;
  os << "# chpctl system configuration\n";
  os << "[meta]\n";
  os << "name = " << cfg.name << "\n";
  os << "\n[constants]\n";
  os << "rho = " << fmt_double(cfg.constants.rho) << "\n";
  os << "cp = " << fmt_double(cfg.constants.cp) << "\n";
  os << "agc_gain = " << fmt_double(cfg.constants.agc_gain) << "\n";
  os << "\n[weights]\n";
  os << "cutoff = " << fmt_double(cfg.weights.cutoff) << "\n";
  os << "alpha = " << fmt_double(cfg.weights.alpha) << "\n";
  os << "epsilon_rel = " << fmt_double(cfg.weights.epsilon_rel) << "\n";
  os << "rho_min = " << fmt_double(cfg.weights.rho_min) << "\n";
  os << "rho_max = " << fmt_double(cfg.weights.rho_max) << "\n";
  os << "x_cap = " << fmt_double(cfg.weights.x_cap) << "\n";
  os << "y_cap = " << fmt_double(cfg.weights.y_cap) << "\n";

  os << "\n[eps]\n";
  auto buses = cfg.buses;
  std::sort(buses.begin(), buses.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& b : buses) {
    os << "bus = id=" << b.id << " M=" << fmt_double(b.inertia) << " D=" << fmt_double(b.damping)
       << " Tg=" << fmt_double(b.gov_time) << " Kp=" << fmt_double(b.droop)
       << " V=" << fmt_double(b.voltage);
    if (b.is_reference) os << " ref=true";
    os << "\n";
  }
  auto lines = cfg.lines;
  std::sort(lines.begin(), lines.end(), [](auto& a, auto& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  for (const auto& l : lines) {
    os << "line = from=" << l.from << " to=" << l.to << " b=" << fmt_double(l.susceptance) << "\n";
  }

  os << "\n[dhs]\n";
  auto edges = cfg.edges;
  std::sort(edges.begin(), edges.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& e : edges) {
    const char* kind = e.kind == EdgeKind::Source ? "source"
                       : e.kind == EdgeKind::HeatPump ? "heatpump" : "load";
    os << "edge = id=" << e.id << " kind=" << kind << " V=" << fmt_double(e.volume)
       << " q=" << fmt_double(e.flow) << " from=" << e.upstream_node
       << " into=" << e.into_node << "\n";
  }
  auto nodes = cfg.nodes;
  std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& n : nodes) {
    os << "node = id=" << n.id << " V=" << fmt_double(n.volume) << "\n";
  }

  os << "\n[hps]\n";
  auto hps = cfg.hps;
  std::sort(hps.begin(), hps.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& h : hps) {
    os << "hp = id=" << h.id << " bus=" << h.eps_bus << " edge=" << h.dhs_edge
       << " cop=" << fmt_double(h.cop) << " gamma_e=" << fmt_double(h.gain_e)
       << " gamma_h=" << fmt_double(h.gain_h) << "\n";
  }

  os << "\n[costs]\n";
  for (const auto& [edge, f] : cfg.costs.source_cost) {
    os << "source = edge=" << edge << " f=" << fmt_double(f) << "\n";
  }
  os << "temp_penalty = " << fmt_double(cfg.costs.temp_penalty_default) << "\n";
  for (const auto& [edge, v] : cfg.costs.edge_penalty) {
    os << "penalty = edge=" << edge << " value=" << fmt_double(v) << "\n";
  }
  for (const auto& [node, v] : cfg.costs.node_penalty) {
    os << "penalty = node=" << node << " value=" << fmt_double(v) << "\n";
  }
  return os.str();
}

SystemIndex build_index(const SystemConfig& cfg) {
  SystemIndex idx;
  for (const auto& e : cfg.edges) {
    switch (e.kind) {
      case EdgeKind::Source: idx.source_edges.push_back(e.id); break;
      case EdgeKind::HeatPump: idx.hp_edges.push_back(e.id); break;
      case EdgeKind::Load: idx.load_edges.push_back(e.id); break;
    }
  }
  std::sort(idx.source_edges.begin(), idx.source_edges.end());
  std::sort(idx.hp_edges.begin(), idx.hp_edges.end());
  std::sort(idx.load_edges.begin(), idx.load_edges.end());
  for (const auto& n : cfg.nodes) idx.node_ids.push_back(n.id);
  std::sort(idx.node_ids.begin(), idx.node_ids.end());

  idx.n_src = static_cast<int>(idx.source_edges.size());
  idx.n_hp = static_cast<int>(idx.hp_edges.size());
  idx.n_load = static_cast<int>(idx.load_edges.size());
  idx.n_nodes = static_cast<int>(idx.node_ids.size());

  int pos = 0;
  for (int id : idx.source_edges) idx.edge_state[id] = pos++;
  for (int id : idx.hp_edges) idx.edge_state[id] = pos++;
  for (int id : idx.load_edges) idx.edge_state[id] = pos++;
  for (int id : idx.node_ids) idx.node_state[id] = pos++;

  std::vector<int> nonref, ref;
  for (const auto& b : cfg.buses) (b.is_reference ? ref : nonref).push_back(b.id);
  std::sort(nonref.begin(), nonref.end());
  idx.bus_ids = nonref;
  for (int id : ref) idx.bus_ids.push_back(id);
  idx.n_bus = static_cast<int>(idx.bus_ids.size());
  idx.ref_bus_pos = idx.n_bus - 1;
  for (int i = 0; i < idx.n_bus; ++i) idx.bus_index[idx.bus_ids[i]] = i;

  auto hps = cfg.hps;
  std::sort(hps.begin(), hps.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& h : hps) {
    idx.hp_bus_pos.push_back(idx.bus_index.at(h.eps_bus));
    idx.hp_edge_state.push_back(idx.edge_state.at(h.dhs_edge));
  }
  return idx;
}

void validate(const SystemConfig& cfg) {
  if (cfg.buses.empty()) throw ConfigError("no EPS buses defined");
  std::set<int> bus_ids;
  int nref = 0;
  for (const auto& b : cfg.buses) {
    if (!bus_ids.insert(b.id).second) throw ConfigError("duplicate bus id " + std::to_string(b.id));
    if (b.inertia <= 0) throw ConfigError("bus " + std::to_string(b.id) + ": inertia M must be > 0");
    if (b.damping <= 0) throw ConfigError("bus " + std::to_string(b.id) + ": damping D must be > 0");
    if (b.gov_time <= 0) throw ConfigError("bus " + std::to_string(b.id) + ": governor time Tg must be > 0");
    if (b.droop <= 0) throw ConfigError("bus " + std::to_string(b.id) + ": droop Kp must be > 0");
    if (b.voltage <= 0) throw ConfigError("bus " + std::to_string(b.id) + ": voltage V must be > 0");
    if (b.is_reference) ++nref;
  }
  if (nref != 1) throw ConfigError("exactly one reference bus required, found " + std::to_string(nref));

  for (const auto& l : cfg.lines) {
    if (!bus_ids.count(l.from) || !bus_ids.count(l.to))
      throw ConfigError("line references unknown bus " +
                        std::to_string(bus_ids.count(l.from) ? l.to : l.from));
    if (l.from == l.to) throw ConfigError("line connects bus " + std::to_string(l.from) + " to itself");
    if (l.susceptance <= 0) throw ConfigError("line " + std::to_string(l.from) + "-" +
                                              std::to_string(l.to) + ": susceptance must be > 0");
  }
  if (cfg.buses.size() > 1) {
    // Union-find connectivity over the line graph.
    std::map<int, int> parent;
    for (int id : bus_ids) parent[id] = id;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& l : cfg.lines) parent[find(l.from)] = find(l.to);
    int root = find(cfg.buses.front().id);
    for (int id : bus_ids)
      if (find(id) != root) throw ConfigError("EPS line graph is disconnected at bus " + std::to_string(id));
  }

  if (cfg.nodes.empty()) throw ConfigError("no DHS nodes defined");
  std::set<int> node_ids;
  for (const auto& n : cfg.nodes) {
    if (!node_ids.insert(n.id).second) throw ConfigError("duplicate node id " + std::to_string(n.id));
    if (n.volume <= 0) throw ConfigError("node " + std::to_string(n.id) + ": volume must be > 0");
  }
  std::set<int> edge_ids;
  int n_src = 0;
  for (const auto& e : cfg.edges) {
    if (!edge_ids.insert(e.id).second) throw ConfigError("duplicate edge id " + std::to_string(e.id));
    if (e.volume <= 0) throw ConfigError("edge " + std::to_string(e.id) + ": volume must be > 0");
    if (e.flow <= 0) throw ConfigError("edge " + std::to_string(e.id) + ": flow must be > 0");
    if (!node_ids.count(e.upstream_node))
      throw ConfigError("edge " + std::to_string(e.id) + ": unknown upstream node " +
                        std::to_string(e.upstream_node));
    if (!node_ids.count(e.into_node))
      throw ConfigError("edge " + std::to_string(e.id) + ": unknown downstream node " +
                        std::to_string(e.into_node));
    if (e.kind == EdgeKind::Source) ++n_src;
  }
  if (cfg.edges.empty()) throw ConfigError("no DHS edges defined");
  if (n_src == 0) throw ConfigError("at least one source edge required");

  // Hydraulic balance: per node, total inflow equals total outflow.
  std::map<int, double> inflow, outflow;
  for (const auto& e : cfg.edges) {
    inflow[e.into_node] += e.flow;
    outflow[e.upstream_node] += e.flow;
  }
  for (const auto& n : cfg.nodes) {
    double in = inflow.count(n.id) ? inflow[n.id] : 0.0;
    double out = outflow.count(n.id) ? outflow[n.id] : 0.0;
    double scale = std::max({in, out, 1e-300});
    if (std::abs(in - out) > 1e-9 * scale)
      throw ConfigError("node " + std::to_string(n.id) + " hydraulic imbalance: inflow " +
                        fmt_double(in) + " vs outflow " + fmt_double(out));
  }

  // DHS weak connectivity (edges link upstream and downstream nodes).
  {
    std::map<int, int> parent;
    for (int id : node_ids) parent[id] = id;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (const auto& e : cfg.edges) parent[find(e.upstream_node)] = find(e.into_node);
    int root = find(cfg.nodes.front().id);
    for (int id : node_ids)
      if (find(id) != root) throw ConfigError("DHS network is disconnected at node " + std::to_string(id));
  }

  std::set<int> hp_ids, hp_buses, hp_edges_used;
  std::set<int> hp_kind_edges;
  for (const auto& e : cfg.edges)
    if (e.kind == EdgeKind::HeatPump) hp_kind_edges.insert(e.id);
  for (const auto& h : cfg.hps) {
    if (!hp_ids.insert(h.id).second) throw ConfigError("duplicate hp id " + std::to_string(h.id));
    if (!bus_ids.count(h.eps_bus))
      throw ConfigError("hp " + std::to_string(h.id) + ": unknown EPS bus " + std::to_string(h.eps_bus));
    if (!hp_kind_edges.count(h.dhs_edge))
      throw ConfigError("hp " + std::to_string(h.id) + ": edge " + std::to_string(h.dhs_edge) +
                        " is not a heatpump edge");
    if (!hp_buses.insert(h.eps_bus).second)
      throw ConfigError("hp couplings not injective: bus " + std::to_string(h.eps_bus) + " reused");
    if (!hp_edges_used.insert(h.dhs_edge).second)
      throw ConfigError("hp couplings not injective: edge " + std::to_string(h.dhs_edge) + " reused");
    if (h.cop <= 0) throw ConfigError("hp " + std::to_string(h.id) + ": cop must be > 0");
    if (h.gain_e < 0 || h.gain_h < 0)
      throw ConfigError("hp " + std::to_string(h.id) + ": gains must be >= 0");
  }
  for (int id : hp_kind_edges)
    if (!hp_edges_used.count(id))
      throw ConfigError("heatpump edge " + std::to_string(id) + " has no hp coupling entry");

  for (const auto& e : cfg.edges) {
    if (e.kind == EdgeKind::Source) {
      auto it = cfg.costs.source_cost.find(e.id);
      if (it == cfg.costs.source_cost.end())
        throw ConfigError("source edge " + std::to_string(e.id) + " has no cost coefficient");
      if (it->second <= 0)
        throw ConfigError("source edge " + std::to_string(e.id) + ": cost must be > 0");
    }
  }
  for (const auto& [edge, f] : cfg.costs.source_cost) {
    (void)f;
    bool found = false;
    for (const auto& e : cfg.edges)
      if (e.id == edge && e.kind == EdgeKind::Source) found = true;
    if (!found) throw ConfigError("cost given for non-source edge " + std::to_string(edge));
  }
  if (cfg.costs.temp_penalty_default <= 0) throw ConfigError("temp_penalty must be > 0");
  for (const auto& [id, v] : cfg.costs.edge_penalty) {
    if (v <= 0) throw ConfigError("penalty for edge " + std::to_string(id) + " must be > 0");
    if (!edge_ids.count(id)) throw ConfigError("penalty references unknown edge " + std::to_string(id));
  }
  for (const auto& [id, v] : cfg.costs.node_penalty) {
    if (v <= 0) throw ConfigError("penalty for node " + std::to_string(id) + " must be > 0");
    if (!node_ids.count(id)) throw ConfigError("penalty references unknown node " + std::to_string(id));
  }

  const auto& c = cfg.constants;
  if (c.rho <= 0 || c.cp <= 0 || c.agc_gain <= 0)
    throw ConfigError("physical constants rho, cp, agc_gain must be > 0");
  const auto& w = cfg.weights;
  if (w.cutoff <= 0) throw ConfigError("weight cutoff must be > 0");
  if (w.alpha <= 0 || w.alpha >= 1) throw ConfigError("weight alpha must lie in (0, 1)");
  if (w.epsilon_rel <= 0) throw ConfigError("epsilon_rel must be > 0");
  if (w.rho_min <= 0 || w.rho_max < w.rho_min) throw ConfigError("need 0 < rho_min <= rho_max");
  if (w.x_cap <= 0 || w.y_cap <= 0) throw ConfigError("x_cap and y_cap must be > 0");
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const SystemConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(cfg);
}

SystemConfig generate_network(int size, const GeneratorOptions& opts) {
  if (size < 2) throw ConfigError("network size must be >= 2 nodes");
  const int n = size;
  std::mt19937_64 rng(opts.seed);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  SystemConfig cfg;
  {
    std::ostringstream nm;
    nm << (opts.topology == Topology::Ring ? "ring" : "radial") << "-" << n << "-seed" << opts.seed;
    cfg.name = nm.str();
  }

  // EPS buses and lines.
  for (int i = 1; i <= n; ++i) {
    EpsBusSpec b;
    b.id = i;
    b.inertia = uni(3.0, 8.0);
    b.damping = uni(0.8, 1.5);
    b.gov_time = uni(0.8, 3.0);
    b.droop = uni(15.0, 25.0);
    b.voltage = 1.0;
    b.is_reference = (i == 1);
    cfg.buses.push_back(b);
  }
  if (opts.topology == Topology::Ring) {
    for (int i = 1; i <= n; ++i) {
      EpsLineSpec l;
      l.from = i;
      l.to = (i % n) + 1;
      l.susceptance = uni(5.0, 15.0);
      if (n == 2 && i == 2) break;  // avoid a duplicate 2-1 line
      cfg.lines.push_back(l);
    }
  } else {
    for (int k = 2; k <= n; ++k) {
      EpsLineSpec l;
      l.from = 1;
      l.to = k;
      l.susceptance = uni(5.0, 15.0);
      cfg.lines.push_back(l);
    }
  }
  cfg.constants.agc_gain = 0.5;

  const double vol = opts.volume_l / 1000.0;  // litres -> m^3

  std::vector<int> hp_edge_ids, source_edge_ids;
  if (opts.topology == Topology::Ring) {
    // Ring: edge i runs node i -> node (i % n) + 1.
    for (int i = 1; i <= n; ++i) {
      DhsNodeSpec nd;
      nd.id = i;
      nd.volume = vol;
      cfg.nodes.push_back(nd);
    }
    const double q = opts.flow;
    // Heat pumps sit on the edges feeding nodes {1, n-1, n} (one at node 1
    // for small systems); sources are spread evenly over the remainder.
    if (n >= 6) hp_edge_ids = {n, n - 2, n - 1};  // edges into nodes 1, n-1, n
    else hp_edge_ids = {n};
    std::set<int> taken(hp_edge_ids.begin(), hp_edge_ids.end());
    int n_sources = n >= 6 ? 3 : 1;
    std::vector<int> cand = {1, 1 + n / 3, 1 + (2 * n) / 3};
    for (int s = 0; s < n_sources; ++s) {
      int id = cand[s];
      while (taken.count(id)) id = (id % n) + 1;
      taken.insert(id);
      source_edge_ids.push_back(id);
    }
    for (int i = 1; i <= n; ++i) {
      DhsEdgeSpec e;
      e.id = i;
      e.volume = vol;
      e.flow = q;
      e.upstream_node = i;
      e.into_node = (i % n) + 1;
      bool is_hp = std::find(hp_edge_ids.begin(), hp_edge_ids.end(), i) != hp_edge_ids.end();
      bool is_src = std::find(source_edge_ids.begin(), source_edge_ids.end(), i) != source_edge_ids.end();
      e.kind = is_hp ? EdgeKind::HeatPump : is_src ? EdgeKind::Source : EdgeKind::Load;
      cfg.edges.push_back(e);
    }
  } else {
    // Radial: node 1 is the hub; every other node sits on its own two-edge
    // loop through the hub, so flows balance petal by petal.
    for (int i = 1; i <= n; ++i) {
      DhsNodeSpec nd;
      nd.id = i;
      nd.volume = vol;
      cfg.nodes.push_back(nd);
    }
    int n_hp = n >= 6 ? 3 : 1;
    int n_sources = n >= 6 ? 3 : 1;
    for (int k = 2; k <= n; ++k) {
      double q = opts.flow * uni(0.6, 1.4);
      DhsEdgeSpec out;  // hub -> petal
      out.id = 2 * (k - 2) + 1;
      out.volume = vol;
      out.flow = q;
      out.upstream_node = 1;
      out.into_node = k;
      DhsEdgeSpec back;  // petal -> hub
      back.id = 2 * (k - 2) + 2;
      back.volume = vol;
      back.flow = q;
      back.upstream_node = k;
      back.into_node = 1;
      // Return edges of the last petals carry the heat pumps; outbound edges
      // of the first petals carry the sources.
      if (k > n - n_hp) {
        back.kind = EdgeKind::HeatPump;
        hp_edge_ids.push_back(back.id);
      }
      if (k <= 1 + n_sources) {
        out.kind = EdgeKind::Source;
        source_edge_ids.push_back(out.id);
      }
      cfg.edges.push_back(out);
      cfg.edges.push_back(back);
    }
  }

  for (int id : source_edge_ids) cfg.costs.source_cost[id] = uni(0.8, 1.6);
  cfg.costs.temp_penalty_default = 1.0;

  // Pair heat pump k with bus/node of matching position: for rings this puts
  // the three pumps at buses {1, n-1, n}.
  std::vector<int> hp_buses;
  if (opts.topology == Topology::Ring) {
    if (static_cast<int>(hp_edge_ids.size()) == 3) hp_buses = {1, n - 1, n};
    else hp_buses = {1};
  } else {
    for (size_t k = 0; k < hp_edge_ids.size(); ++k)
      hp_buses.push_back(n - static_cast<int>(hp_edge_ids.size()) + 1 + static_cast<int>(k));
  }
  for (size_t k = 0; k < hp_edge_ids.size(); ++k) {
    HpCouplingSpec h;
    h.id = static_cast<int>(k) + 1;
    h.eps_bus = hp_buses[k];
    h.dhs_edge = hp_edge_ids[k];
    h.cop = 3.0;
    h.gain_e = 0.6;
    h.gain_h = 0.6;
    cfg.hps.push_back(h);
  }

  validate(cfg);
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t config_hash(const SystemConfig& cfg) { return fnv1a64(serialize_config(cfg)); }

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chpctl
