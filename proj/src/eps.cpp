#include "chpctl/eps.hpp"

#include <cmath>
#include <stdexcept>

namespace chpctl {

EpsState EpsState::zero(int n_bus) {
  EpsState s;
  s.x_theta = Eigen::VectorXd::Zero(n_bus - 1);
  s.omega = Eigen::VectorXd::Zero(n_bus);
  s.pg = Eigen::VectorXd::Zero(n_bus);
  s.g = 0.0;
  return s;
}

EpsModel::EpsModel(const SystemConfig& cfg, const SystemIndex& idx) {
  n_ = idx.n_bus;
  bus_ids_ = idx.bus_ids;
  m_.resize(n_);
  d_.resize(n_);
  tg_.resize(n_);
  kp_.resize(n_);
  std::vector<double> voltage(n_, 1.0);
  for (const auto& b : cfg.buses) {
    int i = idx.bus_index.at(b.id);
    m_(i) = b.inertia;
    d_(i) = b.damping;
    tg_(i) = b.gov_time;
    kp_(i) = b.droop;
    voltage[i] = b.voltage;
  }
  k_i_ = cfg.constants.agc_gain;
  for (const auto& l : cfg.lines) {
    int a = idx.bus_index.at(l.from);
    int b = idx.bus_index.at(l.to);
    lines_.push_back({a, b, l.susceptance * voltage[a] * voltage[b]});
  }
  hp_bus_ = idx.hp_bus_pos;
}

Eigen::VectorXd EpsModel::power_flow(const EpsState& s, const Eigen::VectorXd& p_l) const {
  // theta_i with the reference angle pinned at zero.
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_);
  theta.head(n_ - 1) = s.x_theta;
  Eigen::VectorXd p = -p_l;
  for (const auto& ln : lines_) {
    double flow = ln.w * std::sin(theta(ln.a) - theta(ln.b));
    p(ln.a) += flow;
    p(ln.b) -= flow;
  }
  return p;
}

EpsState EpsModel::derivative(const EpsState& s, const Eigen::VectorXd& p_h,
                              const Eigen::VectorXd& p_l) const {
  EpsState d;
  const int r = n_ - 1;  // reference bus position
  d.x_theta = s.omega.head(n_ - 1).array() - s.omega(r);

  Eigen::VectorXd p = power_flow(s, p_l);
  Eigen::VectorXd p_h_bus = scatter_hp(p_h);
  d.omega = (-d_.cwiseProduct(s.omega) - p + s.pg - p_h_bus).cwiseQuotient(m_);

  Eigen::VectorXd u = -kp_.cwiseProduct(s.omega);
  u(r) += k_i_ * s.g;
  d.pg = (u - s.pg).cwiseQuotient(tg_);
  d.g = -s.omega(r);
  return d;
}

std::complex<double> EpsModel::transfer_Gi(int bus_pos, std::complex<double> s) const {
  const double tg = tg_(bus_pos);
  const bool is_ref = bus_pos == n_ - 1;
  std::complex<double> lag = tg * s + 1.0;
  if (std::abs(lag) == 0.0)
    throw std::domain_error("transfer_Gi: s = -1/Tg pole at bus position " + std::to_string(bus_pos));
  std::complex<double> g = d_(bus_pos) + kp_(bus_pos) / lag;
  if (is_ref) {
    if (std::abs(s) == 0.0)
      throw std::domain_error("transfer_Gi: s = 0 pole of the AGC integrator at the reference bus");
    g += k_i_ / (s * lag);
  }
  return g;
}

SprReport EpsModel::spr_check(double w_min, double w_max, int points_per_decade) const {
  SprReport rep;
  const int decades = static_cast<int>(std::ceil(std::log10(w_max / w_min)));
  const int n_pts = decades * points_per_decade + 1;
  rep.grid_min = std::numeric_limits<double>::infinity();

  for (int i = 0; i < n_; ++i) {
    SprBusReport br;
    br.bus_id = bus_ids_[i];
    const bool is_ref = i == n_ - 1;
    const double tg = tg_(i), dd = d_(i), kp = kp_(i);

    double best = std::numeric_limits<double>::infinity();
    double best_w = 0.0;
    for (int k = 0; k < n_pts; ++k) {
      double w = w_min * std::pow(10.0, static_cast<double>(k) / points_per_decade);
      double re = transfer_Gi(i, std::complex<double>(0.0, w)).real();
      if (re < best) {
        best = re;
        best_w = w;
      }
    }
    // Analytic endpoints. Re G(jw) = D + (K^P - delta_ir K^I Tg)/(1 + w^2 Tg^2):
    // the limits w->0 and w->inf bound the monotone rational term.
    double num = kp - (is_ref ? k_i_ * tg : 0.0);
    double at_zero = dd + num;
    double at_inf = dd;
    if (at_zero < best) {
      best = at_zero;
      best_w = 0.0;
      br.analytic_used = true;
    }
    if (at_inf < best) {
      best = at_inf;
      best_w = std::numeric_limits<double>::infinity();
      br.analytic_used = true;
    }
    br.margin = best;
    br.minimizer = best_w;
    rep.grid_min = std::min(rep.grid_min, best);
    rep.buses.push_back(br);
  }
  rep.pass = rep.grid_min > 0.0;
  return rep;
}

void EpsModel::linearize(Eigen::MatrixXd& A, Eigen::MatrixXd& B, Eigen::MatrixXd& C) const {
  const int nth = n_ - 1;
  const int dim = nth + 2 * n_ + 1;
  const int r = n_ - 1;
  A = Eigen::MatrixXd::Zero(dim, dim);
  const int o_th = 0, o_om = nth, o_pg = nth + n_, o_g = nth + 2 * n_;

  // x_theta_dot = R_I omega
  for (int i = 0; i < nth; ++i) {
    A(o_th + i, o_om + i) = 1.0;
    A(o_th + i, o_om + r) = -1.0;
  }
  // Laplacian of the linearized sine flow, restricted to theta = [x_theta; 0].
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& ln : lines_) {
    lap(ln.a, ln.a) += ln.w;
    lap(ln.b, ln.b) += ln.w;
    lap(ln.a, ln.b) -= ln.w;
    lap(ln.b, ln.a) -= ln.w;
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < nth; ++j) A(o_om + i, o_th + j) = -lap(i, j) / m_(i);
    A(o_om + i, o_om + i) = -d_(i) / m_(i);
    A(o_om + i, o_pg + i) = 1.0 / m_(i);
  }
  for (int i = 0; i < n_; ++i) {
    A(o_pg + i, o_om + i) = -kp_(i) / tg_(i);
    A(o_pg + i, o_pg + i) = -1.0 / tg_(i);
  }
  A(o_pg + r, o_g) = k_i_ / tg_(r);
  A(o_g, o_om + r) = -1.0;

  const int nhp = n_hp();
  B = Eigen::MatrixXd::Zero(dim, nhp);
  for (int k = 0; k < nhp; ++k) B(o_om + hp_bus_[k], k) = 1.0 / m_(hp_bus_[k]);
  C = Eigen::MatrixXd::Zero(nhp, dim);
  for (int k = 0; k < nhp; ++k) C(k, o_om + hp_bus_[k]) = 1.0;
}

Eigen::VectorXd EpsModel::pack(const EpsState& s) const {
  Eigen::VectorXd v(state_dim());
  v << s.x_theta, s.omega, s.pg, s.g;
  return v;
}

EpsState EpsModel::unpack(const Eigen::VectorXd& v) const {
  EpsState s;
  s.x_theta = v.head(n_ - 1);
  s.omega = v.segment(n_ - 1, n_);
  s.pg = v.segment(2 * n_ - 1, n_);
  s.g = v(3 * n_ - 1);
  return s;
}

Eigen::VectorXd EpsModel::scatter_hp(const Eigen::VectorXd& p_h) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (size_t k = 0; k < hp_bus_.size(); ++k) out(hp_bus_[k]) += p_h(static_cast<int>(k));
  return out;
}

Eigen::VectorXd EpsModel::omega_hp(const EpsState& s) const {
  Eigen::VectorXd out(hp_bus_.size());
  for (size_t k = 0; k < hp_bus_.size(); ++k) out(static_cast<int>(k)) = s.omega(hp_bus_[k]);
  return out;
}

}  // namespace chpctl
