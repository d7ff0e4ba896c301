#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "adascope/diffusion.hpp"

namespace adascope {

enum class RewardScheme { Unassigned, Sparse, Backfilled };

// Denoising trajectory recast as an MDP episode. Step k = 0..T-1 corresponds
// to generation step t = T-k: the state holds (z, x_{T-k}) and the action is
// the next sample x_{T-k-1}. xs has length T+1 with xs[k] = x_{T-k}, so the
// action of step k and the state of step k+1 share storage by construction.
struct MdpTrajectory {
  int z = 0;
  int T = 0;
  std::vector<Eigen::VectorXd> xs;        // length T+1, xs[k] = x_{T-k}
  std::vector<Eigen::VectorXd> means;     // behavior transition mean at step k
  std::vector<double> variances;          // behavior transition variance at step k
  std::vector<double> log_probs;          // behavior log-prob of action at step k
  std::vector<Eigen::VectorXd> x0_hats;   // one-jump clean estimate after step k
  std::vector<double> rewards;            // length T once a scheme is assigned
  RewardScheme scheme = RewardScheme::Unassigned;

  const Eigen::VectorXd& state_x(int k) const { return xs.at(static_cast<std::size_t>(k)); }
  const Eigen::VectorXd& action(int k) const { return xs.at(static_cast<std::size_t>(k) + 1); }
  const Eigen::VectorXd& x0() const { return xs.back(); }
  // generation step index t for MDP step k
  int diffusion_t(int k) const { return T - k; }
};

// Reindexes a recorded trajectory into MDP order (k = T - t). Log-probs,
// means, variances and clean estimates are carried over; rewards stay
// unassigned. Throws std::invalid_argument on incomplete records.
MdpTrajectory to_mdp(const Trajectory& traj);

// Terminal-only scheme: r_k = 0 for k < T-1 and r_{T-1} = r_final.
// Throws std::logic_error if a scheme was already assigned.
MdpTrajectory assign_sparse_reward(const MdpTrajectory& m, double r_final);

// Backfilled scheme: r_k = r_final for every step.
// Throws std::logic_error if a scheme was already assigned.
MdpTrajectory assign_backfilled_reward(const MdpTrajectory& m, double r_final);

// Debug dump, one line per step: t, k, state, action, log-prob, reward.
void dump_mdp(const MdpTrajectory& m, std::ostream& os);

}  // namespace adascope
