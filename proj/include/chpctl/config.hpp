#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chpctl {

/// Raised on malformed or inconsistent system configurations. The message
/// names the violated invariant and the offending element.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct EpsBusSpec {
  int id = 0;
  double inertia = 1.0;    // M_i, s^2*pu
  double damping = 1.0;    // D_i, pu/(rad/s)
  double gov_time = 1.0;   // T_g,i, s
  double droop = 10.0;     // K^P_i, pu/(rad/s)
  double voltage = 1.0;    // V_i, pu
  bool is_reference = false;
};

struct EpsLineSpec {
  int from = 0;
  int to = 0;
  double susceptance = 1.0;  // |B_ij|, pu
};

enum class EdgeKind { Source, HeatPump, Load };

struct DhsEdgeSpec {
  int id = 0;
  EdgeKind kind = EdgeKind::Load;
  double volume = 0.05;   // V^E_j, m^3
  double flow = 1.0;      // q^E_j, kg/s
  int upstream_node = 0;  // node whose outlet feeds this edge
  int into_node = 0;      // node receiving this edge's outlet
};

struct DhsNodeSpec {
  int id = 0;
  double volume = 0.05;  // V^N_k, m^3
};

struct HpCouplingSpec {
  int id = 0;
  int eps_bus = 0;
  int dhs_edge = 0;
  double cop = 3.0;      // CoP_k
  double gain_e = 0.0;   // gamma^E_k, MW/(rad/s)
  double gain_h = 0.0;   // gamma^H_k, MW per Sig^H unit
};

struct CostConfig {
  std::map<int, double> source_cost;    // f^G by source edge id, cost/MW^2
  double temp_penalty_default = 1.0;    // F^D fallback, penalty/K^2
  std::map<int, double> edge_penalty;   // F^D overrides by edge id
  std::map<int, double> node_penalty;   // F^D overrides by node id
};

struct PhysicalConstants {
  double rho = 1000.0;    // kg/m^3
  double cp = 4182.0;     // J/(kg*K)
  double agc_gain = 0.5;  // K^I, pu/(rad*s)
};

/// Loop-shaping weight and synthesis knobs. cutoff/alpha define the
/// high-pass weight W_HP(s) = alpha + (s/cutoff)/(1 + s/cutoff).
struct SynthesisWeights {
  double cutoff = 0.018849555921538759;  // omega_h, rad/s (2*pi*0.003 Hz)
  double alpha = 0.01;
  double epsilon_rel = 1e-6;  // LMI strictness, relative to problem scale
  double rho_min = 1e-4;
  double rho_max = 1e-2;
  double x_cap = 1e5;         // spectral cap on X after equilibration
  double y_cap = 1e5;         // entrywise cap on Y after equilibration
};

struct SystemConfig {
  std::string name = "unnamed";
  std::vector<EpsBusSpec> buses;
  std::vector<EpsLineSpec> lines;
  std::vector<DhsEdgeSpec> edges;
  std::vector<DhsNodeSpec> nodes;
  std::vector<HpCouplingSpec> hps;
  CostConfig costs;
  PhysicalConstants constants;
  SynthesisWeights weights;
};

/// Canonical index maps for the fixed element ordering
/// [Source edges, HeatPump edges, Load edges, Nodes], blocks sorted by id,
/// and EPS buses ordered [non-reference by id..., reference last].
struct SystemIndex {
  std::vector<int> source_edges;  // edge ids, sorted
  std::vector<int> hp_edges;
  std::vector<int> load_edges;
  std::vector<int> node_ids;      // sorted
  std::vector<int> bus_ids;       // non-ref sorted, then the reference bus

  std::map<int, int> edge_state;  // edge id -> state index in [0, n_x)
  std::map<int, int> node_state;  // node id -> state index
  std::map<int, int> bus_index;   // bus id -> position in bus_ids

  int n_src = 0, n_hp = 0, n_load = 0, n_nodes = 0;
  int n_edges() const { return n_src + n_hp + n_load; }
  int n_x() const { return n_edges() + n_nodes; }
  int n_bus = 0;
  int ref_bus_pos = 0;  // always n_bus - 1

  // HP couplings in hp id order; parallel arrays into bus/state space.
  std::vector<int> hp_bus_pos;     // position of HP k's bus in bus_ids
  std::vector<int> hp_edge_state;  // state index of HP k's edge
};

SystemIndex build_index(const SystemConfig& cfg);

/// Validates every type invariant; throws ConfigError naming the violation.
void validate(const SystemConfig& cfg);

/// Parse / serialize the hierarchical key-value configuration format.
/// serialize() emits a canonical form that round-trips bit-identically.
SystemConfig parse_config(const std::string& text);
std::string serialize_config(const SystemConfig& cfg);

SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& cfg, const std::string& path);

enum class Topology { Ring, Radial };

struct GeneratorOptions {
  Topology topology = Topology::Ring;
  std::uint64_t seed = 0;
  double volume_l = 50.0;  // uniform water volume per element, litres
  double flow = 2.5;       // ring mass flow, kg/s
};

/// Emits a valid, hydraulically balanced synthetic network with `size` DHS
/// nodes and `size` EPS buses. For size >= 6 three heat pumps are placed at
/// buses/nodes {1, size-1, size}; smaller systems get one at node 1.
SystemConfig generate_network(int size, const GeneratorOptions& opts);

/// FNV-1a 64-bit hash of the canonical serialization; used for
/// content-addressing configs and controllers in run manifests.
std::uint64_t config_hash(const SystemConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

}  // namespace chpctl
