#pragma once

#include <cstdint>
#include <ostream>

#include "sagin/geometry.hpp"
#include "sagin/scenario.hpp"

namespace sagin {

struct ChannelSet {
  std::vector<CVec> h;  // sat -> ES, N_S
  std::vector<CMat> G;  // sat -> RIS, N_R x N_S
  std::vector<CVec> g;  // RIS -> ES, N_R
  CellVectors v;        // BS -> UE, N_B
  CellVectors f;        // sat -> UE, N_S
  CellVectors q;        // RIS -> UE, N_R
  std::vector<CVec> u;  // BS -> ES, N_B
  RVec rain;            // linear attenuation per cell
};

/// Channels seen through the current RIS phases.
struct EffectiveChannels {
  std::vector<CVec> h;  // h~_k
  CellVectors f;        // f~_{k,l}
};

/// Unit-norm UPA response, element index (nx)*Ny + ny.
CVec steering_vector(const ArrayGeometry& geom, double wavelength, const DirectionAngles& angles);

struct DishPattern {
  double g_max_dbi;
  double phi_r_deg;
  double phi_m_deg;
};

/// Pattern breakpoints; throws InvalidGeometry when the pieces cannot be ordered.
DishPattern dish_pattern(double diameter, double wavelength, double eta);

/// Linear receive gain of the ES dish at `offaxis_deg` from boresight.
double receive_gain(double offaxis_deg, double diameter, double wavelength, double eta);

/// K linear rain attenuations; ln(xi_dB) ~ N(mu, sigma^2).
RVec sample_rain(double mu, double sigma, std::uint64_t seed, int count);

/// Dish boresight of ES k (global coordinates).
Vec3 dish_boresight(const Scenario& scenario, int cell);

/// All channels for the given RIS poses. Throws HalfspaceViolation when the
/// satellite or the ES of a cell lies behind its RIS panel.
ChannelSet build_channels(const Scenario& scenario, const std::vector<Frame>& ris_frames, const RVec& rain);

/// Rebuild only the RIS-dependent links (G_k, g_k, q_{k,.}) of one cell.
void rebuild_cell_reflections(const Scenario& scenario, int cell, const Frame& ris_frame, ChannelSet& channels);

/// Drop every reflected path (g and q set to zero).
void zero_reflections(ChannelSet& channels);

/// diag(a^H) B, so that a^H diag(zeta) B w = zeta^T (cascade(a, B) w).
CMat cascade(const CVec& a, const CMat& B);

CVec unit_phasors(const RVec& phases);

EffectiveChannels effective_channels(const ChannelSet& channels, const std::vector<RVec>& phases);
EffectiveChannels effective_channels_zeta(const ChannelSet& channels, const std::vector<CVec>& zeta);

/// CSV rows: link,k,l,row,col,re,im
void dump_channels(const ChannelSet& channels, std::ostream& out);

}  // namespace sagin
