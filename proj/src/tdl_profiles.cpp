// SPDX-License-Identifier: Apache-2.0
//
// TDL power-delay profiles. Normalized delays and powers are transcribed
// from 3GPP TR 38.901 (v16.1.0) section 7.7.2. Taps are re-sorted by
// delay and powers renormalized to unit total energy.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <string>

#include "semlink/channel.hpp"
#include "semlink/errors.hpp"

namespace semlink {

namespace {

struct RawTap {
  double delay;
  double power_db;
};

// TR 38.901 Table 7.7.2-1, TDL-A (NLOS).
constexpr RawTap kTdlA[] = {
    {0.0000, -13.4}, {0.3819, 0.0},   {0.4025, -2.2},  {0.5868, -4.0},  {0.4610, -6.0},
    {0.5375, -8.2},  {0.6708, -9.9},  {0.5750, -10.5}, {0.7618, -7.5},  {1.5375, -15.9},
    {1.8978, -6.6},  {2.2242, -16.7}, {2.1718, -12.4}, {2.4942, -15.2}, {2.5119, -10.8},
    {3.0582, -11.3}, {4.0810, -12.7}, {4.4579, -16.2}, {4.5695, -18.3}, {4.7966, -18.9},
    {5.0066, -16.6}, {5.3043, -19.9}, {9.6586, -29.7},
};

// TR 38.901 Table 7.7.2-2, TDL-B (NLOS).
constexpr RawTap kTdlB[] = {
    {0.0000, 0.0},   {0.1072, -2.2},  {0.2155, -4.0},  {0.2095, -3.2},  {0.2870, -9.8},
    {0.2986, -1.2},  {0.3752, -3.4},  {0.5055, -5.2},  {0.3681, -7.6},  {0.3697, -3.0},
    {0.5700, -8.9},  {0.5283, -9.0},  {1.1021, -4.8},  {1.2756, -5.7},  {1.5474, -7.5},
    {1.7842, -1.9},  {2.0169, -7.6},  {2.8294, -12.2}, {3.0219, -9.8},  {3.6187, -11.4},
    {4.1067, -14.9}, {4.2790, -9.2},  {4.7834, -11.3},
};

// TR 38.901 Table 7.7.2-3, TDL-C (NLOS).
constexpr RawTap kTdlC[] = {
    {0.0000, -4.4},  {0.2099, -1.2},  {0.2219, -3.5},  {0.2329, -5.2},  {0.2176, -2.5},
    {0.6366, 0.0},   {0.6448, -2.2},  {0.6560, -3.9},  {0.6584, -7.4},  {0.7935, -7.1},
    {0.8213, -10.7}, {0.9336, -11.1}, {1.2285, -5.1},  {1.3083, -6.8},  {2.1704, -8.7},
    {2.7105, -13.2}, {4.2589, -13.9}, {4.6003, -13.9}, {5.4902, -15.8}, {5.6077, -17.1},
    {6.3065, -16.0}, {6.6374, -15.7}, {7.0427, -21.6}, {8.6523, -22.8},
};

// TR 38.901 Table 7.7.2-4, TDL-D (LOS). Specular path -0.2 dB at delay 0
// plus the diffuse tap below; K = 13.3 dB.
constexpr double kTdlDSpecularDb = -0.2;
constexpr RawTap kTdlD[] = {
    {0.000, -13.5}, {0.035, -18.8}, {0.612, -21.0}, {1.363, -22.8}, {1.405, -17.9},
    {1.804, -20.1}, {2.596, -21.9}, {1.775, -22.9}, {4.042, -27.8}, {7.937, -23.6},
    {9.424, -24.8}, {9.708, -30.0}, {12.525, -27.7},
};

// TR 38.901 Table 7.7.2-5, TDL-E (LOS). Specular path -0.03 dB; K = 22 dB.
constexpr double kTdlESpecularDb = -0.03;
constexpr RawTap kTdlE[] = {
    {0.0000, -22.03}, {0.5133, -15.8},  {0.5440, -18.1},  {0.5630, -19.8},  {0.5440, -22.9},
    {0.7112, -22.4},  {1.9092, -18.6},  {1.9293, -20.8},  {1.9589, -22.6},  {2.6426, -22.3},
    {3.7136, -25.6},  {5.4524, -20.2},  {12.0034, -29.8}, {20.6519, -29.2},
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

TdlProfile build(TdlModel model, std::span<const RawTap> raw, bool los, double specular_db) {
  std::vector<RawTap> taps(raw.begin(), raw.end());
  // stable so that equal delays keep table order (the LOS diffuse tap stays first)
  std::stable_sort(taps.begin(), taps.end(),
                   [](const RawTap& a, const RawTap& b) { return a.delay < b.delay; });

  std::vector<double> lin;
  lin.reserve(taps.size());
  for (const auto& t : taps) lin.push_back(db_to_linear(t.power_db));

  TdlProfile p;
  p.model = model;
  p.los = los;
  if (los) {
    const double specular = db_to_linear(specular_db);
    p.k_factor_db = 10.0 * std::log10(specular / lin.front());
    lin.front() += specular;
  }
  const double total = std::accumulate(lin.begin(), lin.end(), 0.0);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    p.normalized_delays.push_back(taps[i].delay);
    p.powers_db.push_back(10.0 * std::log10(lin[i] / total));
  }
  return p;
}

}  // namespace

std::vector<double> TdlProfile::linear_powers() const {
  std::vector<double> out;
  out.reserve(powers_db.size());
  for (double db : powers_db) out.push_back(db_to_linear(db));
  return out;
}

std::string_view to_string(TdlModel m) {
  switch (m) {
    case TdlModel::A: return "TDL-A";
    case TdlModel::B: return "TDL-B";
    case TdlModel::C: return "TDL-C";
    case TdlModel::D: return "TDL-D";
    case TdlModel::E: return "TDL-E";
  }
  return "?";
}

TdlModel parse_tdl_model(std::string_view name) {
  std::string s;
  for (char ch : name) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  if (s.rfind("TDL-", 0) == 0) s = s.substr(4);
  if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'E') return static_cast<TdlModel>(s[0] - 'A');
  throw InvalidArgument("unknown TDL model: " + std::string(name));
}

const TdlProfile& tdl_profile(TdlModel model) {
  static const std::array<TdlProfile, 5> profiles{
      build(TdlModel::A, kTdlA, false, 0.0),
      build(TdlModel::B, kTdlB, false, 0.0),
      build(TdlModel::C, kTdlC, false, 0.0),
      build(TdlModel::D, kTdlD, true, kTdlDSpecularDb),
      build(TdlModel::E, kTdlE, true, kTdlESpecularDb),
  };
  return profiles[static_cast<std::size_t>(model)];
}

void write_profile_table(std::ostream& os) {
  os << "# TDL power-delay profiles, normalized to unit energy\n";
  os << "# model tap normalized_delay power_db k_factor_db\n";
  const auto flags = os.flags();
  for (TdlModel m : kAllTdlModels) {
    const TdlProfile& p = tdl_profile(m);
    for (std::size_t i = 0; i < p.taps(); ++i) {
      os << to_string(m) << ' ' << (i + 1) << ' ' << std::fixed << std::setprecision(4)
         << p.normalized_delays[i] << ' ' << std::setprecision(4) << p.powers_db[i] << ' ';
      if (p.los && i == 0) {
        os << std::setprecision(2) << p.k_factor_db;
      } else {
        os << '-';
      }
      os << '\n';
    }
  }
  os.flags(flags);
}

}  // namespace semlink
