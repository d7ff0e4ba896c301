#include "adascope/mdp.hpp"

#include <ostream>
#include <stdexcept>

namespace adascope {

MdpTrajectory to_mdp(const Trajectory& traj) {
  const int T = traj.T;
  const auto steps = static_cast<std::size_t>(T);
  if (T < 1 || traj.states.size() != steps + 1 || traj.means.size() != steps ||
      traj.variances.size() != steps || traj.log_probs.size() != steps ||
      traj.x0_hats.size() != steps) {
    throw std::invalid_argument("to_mdp: incomplete trajectory record");
  }
  MdpTrajectory m;
  m.z = traj.z;
  m.T = T;
  m.xs.reserve(steps + 1);
  m.means.reserve(steps);
  m.variances.reserve(steps);
  m.log_probs.reserve(steps);
  m.x0_hats.reserve(steps);
  // k = T - t: xs[k] = states[T-k]; the transition of step k is stored at
  // trajectory index t-1 = T-k-1.
  for (int k = 0; k <= T; ++k) m.xs.push_back(traj.states[static_cast<std::size_t>(T - k)]);
  for (int k = 0; k < T; ++k) {
    const auto i = static_cast<std::size_t>(T - k - 1);
    m.means.push_back(traj.means[i]);
    m.variances.push_back(traj.variances[i]);
    m.log_probs.push_back(traj.log_probs[i]);
    m.x0_hats.push_back(traj.x0_hats[i]);
  }
  return m;
}

namespace {

void check_unassigned(const MdpTrajectory& m) {
  if (m.scheme != RewardScheme::Unassigned || !m.rewards.empty()) {
    throw std::logic_error("reward scheme already assigned");
  }
}

}  // namespace

MdpTrajectory assign_sparse_reward(const MdpTrajectory& m, double r_final) {
  check_unassigned(m);
  MdpTrajectory out = m;
  out.rewards.assign(static_cast<std::size_t>(m.T), 0.0);
  out.rewards.back() = r_final;
  out.scheme = RewardScheme::Sparse;
  return out;
}

MdpTrajectory assign_backfilled_reward(const MdpTrajectory& m, double r_final) {
  check_unassigned(m);
  MdpTrajectory out = m;
  out.rewards.assign(static_cast<std::size_t>(m.T), r_final);
  out.scheme = RewardScheme::Backfilled;
  return out;
}

void dump_mdp(const MdpTrajectory& m, std::ostream& os) {
  for (int k = 0; k < m.T; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    os << "t=" << m.diffusion_t(k) << " k=" << k << " state=["
       << m.state_x(k).transpose() << "] action=[" << m.action(k).transpose()
       << "] log_prob=" << m.log_probs[ku] << " reward="
       << (m.rewards.empty() ? 0.0 : m.rewards[ku]) << "\n";
  }
}

}  // namespace adascope
