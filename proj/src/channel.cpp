#include "sagin/channel.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "sagin/rng.hpp"

namespace sagin {

namespace {

double free_space_loss(double distance, double wavelength) {
  const double x = 4.0 * kPi * distance / wavelength;
  return x * x;
}

// Largest tolerated excess of phi_m over phi_r: a boundary jump of at most 0.5 dB.
const double kBreakpointSlack = std::pow(10.0, 0.5 / 25.0);

}  // namespace

CVec steering_vector(const ArrayGeometry& geom, double wavelength, const DirectionAngles& angles) {
  const int n = geom.size();
  const double k0 = kTwoPi / wavelength * geom.spacing;
  const double ux = std::sin(angles.elevation) * std::cos(angles.azimuth);
  const double uy = std::sin(angles.elevation) * std::sin(angles.azimuth);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVec a(n);
  for (int ix = 0; ix < geom.nx; ++ix)
    for (int iy = 0; iy < geom.ny; ++iy)
      a(ix * geom.ny + iy) = std::polar(scale, k0 * (ix * ux + iy * uy));
  return a;
}

DishPattern dish_pattern(double diameter, double wavelength, double eta) {
  const double ratio = diameter / wavelength;
  if (!(ratio > 1.0)) throw InvalidGeometry("dish diameter must exceed one wavelength");
  const double g_max = eta * std::pow(kPi * ratio, 2);
  DishPattern p;
  p.g_max_dbi = linear_to_db(g_max);
  p.phi_r_deg = 15.85 * std::pow(ratio, -0.6);
  const double g1 = 32.0 - 25.0 * std::log10(p.phi_r_deg);
  if (p.g_max_dbi <= g1) throw InvalidGeometry("dish gain does not exceed the sidelobe plateau");
  p.phi_m_deg = 20.0 / ratio * std::sqrt(p.g_max_dbi - g1);
  if (p.phi_m_deg > p.phi_r_deg * kBreakpointSlack)
    throw InvalidGeometry("main-lobe breakpoint lies beyond the plateau breakpoint");
  return p;
}

double receive_gain(double offaxis_deg, double diameter, double wavelength, double eta) {
  const DishPattern p = dish_pattern(diameter, wavelength, eta);
  const double phi = offaxis_deg;
  double dbi;
  if (phi < p.phi_m_deg) {
    dbi = p.g_max_dbi - 0.0025 * std::pow(diameter * phi / wavelength, 2);
  } else if (phi <= p.phi_r_deg) {
    dbi = 32.0 - 25.0 * std::log10(p.phi_r_deg);
  } else {
    dbi = std::max(32.0 - 25.0 * std::log10(phi), -10.0);
  }
  return db_to_linear(dbi);
}

RVec sample_rain(double mu, double sigma, std::uint64_t seed, int count) {
  RVec xi(count);
  auto rng = make_rng(seed, {kTagRain});
  std::normal_distribution<double> normal(mu, sigma > 0 ? sigma : 1.0);
  for (int k = 0; k < count; ++k) {
    const double ln_db = sigma > 0 ? normal(rng) : mu;
    xi(k) = db_to_linear(std::exp(ln_db));
  }
  return xi;
}

Vec3 dish_boresight(const Scenario& s, int cell) { return -s.es_axis_dirs[cell]; }

void rebuild_cell_reflections(const Scenario& s, int k, const Frame& ris, ChannelSet& ch) {
  const Vec3& sat = s.sat_position();
  const Vec3& es = s.es_positions[k];
  if (!forward_halfspace(ris, sat))
    throw HalfspaceViolation("satellite lies behind RIS panel of cell " + std::to_string(k));
  if (!forward_halfspace(ris, es)) throw HalfspaceViolation("ES lies behind RIS panel of cell " + std::to_string(k));
  const double lam = s.wavelength;
  const double NR = s.ris_array.size(), NS = s.sat_array.size();
  const double xi = ch.rain(k);

  const double d_sr = (sat - ris.translation).norm();
  const CVec a_arr = steering_vector(s.ris_array, lam, direction_angles(ris, sat));
  const CVec a_dep = steering_vector(s.sat_array, lam, direction_angles(s.sat_frame, ris.translation));
  ch.G[k] = std::sqrt(NR * NS / (free_space_loss(d_sr, lam) * xi)) * (a_arr * a_dep.adjoint());

  const double g_max = receive_gain(0.0, s.es_dish_diameter, lam, s.es_dish_efficiency);
  const double d_re = (es - ris.translation).norm();
  ch.g[k] = std::sqrt(NR * g_max / free_space_loss(d_re, lam)) * steering_vector(s.ris_array, lam, direction_angles(ris, es));

  for (int l = 0; l < s.L(); ++l) {
    const Vec3& ue = s.ue_positions[k][l];
    if (!forward_halfspace(ris, ue)) {
      // No reflection reaches a UE behind the panel.
      ch.q[k][l] = CVec::Zero(s.ris_array.size());
      continue;
    }
    const double d_ru = (ue - ris.translation).norm();
    ch.q[k][l] = std::sqrt(NR / free_space_loss(d_ru, lam)) * steering_vector(s.ris_array, lam, direction_angles(ris, ue));
  }
}

ChannelSet build_channels(const Scenario& s, const std::vector<Frame>& ris_frames, const RVec& rain) {
  const int K = s.K(), L = s.L();
  if (static_cast<int>(ris_frames.size()) != K || rain.size() != K)
    throw InvalidGeometry("build_channels: expected one RIS frame and one rain value per cell");
  const double lam = s.wavelength;
  const double NS = s.sat_array.size(), NB = s.bs_array.size();
  const Vec3& sat = s.sat_position();

  ChannelSet ch;
  ch.rain = rain;
  ch.h.resize(K);
  ch.G.resize(K);
  ch.g.resize(K);
  ch.u.resize(K);
  ch.v.assign(K, std::vector<CVec>(L));
  ch.f.assign(K, std::vector<CVec>(L));
  ch.q.assign(K, std::vector<CVec>(L));

  for (int k = 0; k < K; ++k) {
    const Vec3& es = s.es_positions[k];
    const Vec3 bore = dish_boresight(s, k);
    const double d_es = (sat - es).norm();
    const double phi1 = angle_between_deg(bore, sat - es);
    const double gain1 = receive_gain(phi1, s.es_dish_diameter, lam, s.es_dish_efficiency);
    ch.h[k] = std::sqrt(NS * gain1 / (free_space_loss(d_es, lam) * rain(k))) *
              steering_vector(s.sat_array, lam, direction_angles(s.sat_frame, es));

    const Frame& bs = s.bs_frames[k];
    const double d_be = (es - bs.translation).norm();
    const double phiu = angle_between_deg(bore, bs.translation - es);
    const double gainu = receive_gain(phiu, s.es_dish_diameter, lam, s.es_dish_efficiency);
    ch.u[k] = std::sqrt(NB * gainu / free_space_loss(d_be, lam)) *
              steering_vector(s.bs_array, lam, direction_angles(bs, es));

    for (int l = 0; l < L; ++l) {
      const Vec3& ue = s.ue_positions[k][l];
      const double d_u = (ue - bs.translation).norm();
      ch.v[k][l] = (lam * std::sqrt(NB) / (4.0 * kPi * d_u)) * steering_vector(s.bs_array, lam, direction_angles(bs, ue));
      const double d_su = (sat - ue).norm();
      ch.f[k][l] = std::sqrt(NS / (free_space_loss(d_su, lam) * rain(k))) *
                   steering_vector(s.sat_array, lam, direction_angles(s.sat_frame, ue));
    }
    rebuild_cell_reflections(s, k, ris_frames[k], ch);
  }
  return ch;
}

void zero_reflections(ChannelSet& ch) {
  for (auto& g : ch.g) g.setZero();
  for (auto& row : ch.q)
    for (auto& q : row) q.setZero();
}

CMat cascade(const CVec& a, const CMat& B) { return a.conjugate().asDiagonal() * B; }

CVec unit_phasors(const RVec& phases) {
  CVec z(phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) z(i) = std::polar(1.0, phases(i));
  return z;
}

EffectiveChannels effective_channels_zeta(const ChannelSet& ch, const std::vector<CVec>& zeta) {
  const int K = static_cast<int>(ch.h.size());
  EffectiveChannels eff;
  eff.h.resize(K);
  eff.f.resize(K);
  for (int k = 0; k < K; ++k) {
    // h~ = h + G^H diag(conj zeta) g
    const CVec zc = zeta[k].conjugate();
    eff.h[k] = ch.h[k] + ch.G[k].adjoint() * zc.cwiseProduct(ch.g[k]);
    eff.f[k].resize(ch.f[k].size());
    for (std::size_t l = 0; l < ch.f[k].size(); ++l)
      eff.f[k][l] = ch.f[k][l] + ch.G[k].adjoint() * zc.cwiseProduct(ch.q[k][l]);
  }
  return eff;
}

EffectiveChannels effective_channels(const ChannelSet& ch, const std::vector<RVec>& phases) {
  std::vector<CVec> zeta;
  for (const auto& p : phases) zeta.push_back(unit_phasors(p));
  return effective_channels_zeta(ch, zeta);
}

void dump_channels(const ChannelSet& ch, std::ostream& out) {
  char buf[128];
  auto emit = [&](const char* tag, std::size_t k, long l, const CMat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%ld,%ld,%ld,%.17g,%.17g\n", tag, k, l, static_cast<long>(r),
                      static_cast<long>(c), m(r, c).real(), m(r, c).imag());
        out << buf;
      }
  };
  out << "link,k,l,row,col,re,im\n";
  for (std::size_t k = 0; k < ch.h.size(); ++k) {
    emit("h", k, -1, ch.h[k]);
    emit("G", k, -1, ch.G[k]);
    emit("g", k, -1, ch.g[k]);
    emit("u", k, -1, ch.u[k]);
    for (std::size_t l = 0; l < ch.v[k].size(); ++l) {
      emit("v", k, static_cast<long>(l), ch.v[k][l]);
      emit("f", k, static_cast<long>(l), ch.f[k][l]);
      emit("q", k, static_cast<long>(l), ch.q[k][l]);
    }
    std::snprintf(buf, sizeof buf, "rain,%zu,-1,0,0,%.17g,0\n", k, ch.rain(k));
    out << buf;
  }
}

}  // namespace sagin
