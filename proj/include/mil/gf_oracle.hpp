#pragma once

#include "mil/model.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mil {

/// Squared coordinates w_k = v_k^2 of a neuron under the gradient flow, at time tau.
struct FlowState {
  Vector w;
  double tau = 0.0;
};

class IntegratorFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dw_k/dtau = 4 1{k<=P} (1 + L w_k^{L-1}) w_k - 4 (sum_{j<=P} w_j + L sum_{j<=P} w_j^L) w_k.
/// Without the higher-order terms every L-term is dropped.
Vector gf_rhs(const Vector& w, int P, int L, bool include_higher_order);

/// Fixed-step RK4, renormalizing sum(w) = 1 after each step. Returns the states
/// at tau = 0, record_every*dt, ..., and the final time. Throws
/// IntegratorFailure when a coordinate drops below -1e-10.
std::vector<FlowState> integrate(const Vector& w0, int P, int L, double tau_max, double dt,
                                 bool include_higher_order, long record_every = 1);

/// |w_{<=P}| / |w_{>P}| in squared-norm terms; +inf when the tail is empty.
double flow_norm_ratio(const Vector& w, int P);

/// First tau at which the norm ratio reaches `level`, interpolated linearly
/// between recorded states.
std::optional<double> norm_ratio_crossing(const std::vector<FlowState>& traj, int P, double level = 1.0);

/// First tau at which w_index reaches `level`.
std::optional<double> coordinate_crossing(const std::vector<FlowState>& traj, int index, double level);

/// Growth constant c of the 1-D lower bound dw/dtau = c L w^L for the leading
/// coordinate, given a gap v_1^2 / max_k v_k^2 >= 1 + c_gap/2 among the
/// relevant coordinates: with 1 + c_gL = (1 + c_gap/2)^{L-1}, c = c_gL / (1 + c_gL).
double stage2_rate_constant(int L, double c_gap);

/// Time for dw/dtau = c_L L w^L to reach 3/4 from w1_0, by quadrature of dtau/dw.
double stage2_escape_time(double w1_0, int L, double c_L);

/// Closed form of the same integral: (w0^{1-L} - (3/4)^{1-L}) / (c_L L (L - 1)).
double stage2_escape_time_closed_form(double w1_0, int L, double c_L);

}  // namespace mil
