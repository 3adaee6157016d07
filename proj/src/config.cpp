// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "semlink/channel.hpp"
#include "semlink/errors.hpp"
#include "semlink/harness.hpp"

namespace semlink {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // shortest text that parses back to the same double
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || std::isnan(v)) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  int base = 10;
  std::size_t off = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    off = 2;
  }
  const auto [ptr, ec] = std::from_chars(s.data() + off, s.data() + s.size(), v, base);
  if (s.size() == off || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("not an unsigned integer: '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  const auto v = to_u64(s);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ConfigError("integer out of range: '" + s + "'");
  }
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out;
}

template <class F>
auto rethrow_as_config(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

struct Key {
  std::string_view name;
  std::string_view doc;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<Key> k = {
      {"chain", "analog | digital",
       [](C& c, S v) {
         if (v == "analog") {
           c.chain = ChainKind::Analog;
         } else if (v == "digital") {
           c.chain = ChainKind::Digital;
         } else {
           throw ConfigError("expected analog or digital");
         }
       },
       [](const C& c) { return std::string(c.chain == ChainKind::Analog ? "analog" : "digital"); }},
      {"codec", "analog codec: pairing | linear",
       [](C& c, S v) { c.codec = v; }, [](const C& c) { return c.codec; }},
      {"codec.latent_dim", "linear codec real latent dimensions (even); 0 = half the input",
       [](C& c, S v) { c.latent_dim = to_u64(v); },
       [](const C& c) { return std::to_string(c.latent_dim); }},
      {"codec.train_snr_db", "linear codec training SNR in dB (inf = noiseless)",
       [](C& c, S v) { c.train_snr_db = to_double(v); },
       [](const C& c) { return fmt_double(c.train_snr_db); }},
      {"codec.train_epochs", "linear codec training epochs",
       [](C& c, S v) { c.train_epochs = to_int(v); },
       [](const C& c) { return std::to_string(c.train_epochs); }},
      {"codec.train_samples", "linear codec training corpus size",
       [](C& c, S v) { c.train_samples = to_u64(v); },
       [](const C& c) { return std::to_string(c.train_samples); }},
      {"digital.modulation_order", "digital chain QAM order: 16 | 256",
       [](C& c, S v) { c.modulation_order = to_int(v); },
       [](const C& c) { return std::to_string(c.modulation_order); }},
      {"digital.parity", "digital chain: choose its CR so channel uses match the analog chain at cr",
       [](C& c, S v) { c.parity = to_bool(v); },
       [](const C& c) { return std::string(c.parity ? "true" : "false"); }},
      {"channel", "awgn | rayleigh | tdl-a | tdl-b | tdl-c | tdl-d | tdl-e",
       [](C& c, S v) {
         std::string low = v;
         std::transform(low.begin(), low.end(), low.begin(),
                        [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
         c.channel = low;
       },
       [](const C& c) { return c.channel; }},
      {"channel.rayleigh_hc", "Rayleigh channel variance E|h|^2",
       [](C& c, S v) { c.rayleigh_hc = to_double(v); },
       [](const C& c) { return fmt_double(c.rayleigh_hc); }},
      {"channel.ds_desired_ns", "TDL RMS delay spread in ns",
       [](C& c, S v) { c.ds_desired_ns = to_double(v); },
       [](const C& c) { return fmt_double(c.ds_desired_ns); }},
      {"channel.speed_mps", "user speed in m/s (sets the maximum Doppler shift)",
       [](C& c, S v) { c.speed_mps = to_double(v); },
       [](const C& c) { return fmt_double(c.speed_mps); }},
      {"snr_grid_db", "comma-separated SNR points in dB",
       [](C& c, S v) { c.snr_grid_db = to_list(v); },
       [](const C& c) { return fmt_list(c.snr_grid_db); }},
      {"cr", "compression rate: fraction of feature cells kept (analog chain)",
       [](C& c, S v) { c.cr = to_double(v); }, [](const C& c) { return fmt_double(c.cr); }},
      {"pilot_scheme", "block | kronecker | one_pilot",
       [](C& c, S v) { c.pilot_scheme = parse_pilot_kind(v); },
       [](const C& c) { return std::string(to_string(c.pilot_scheme)); }},
      {"estimation", "perfect | ls | mmse (ls and mmse need a tdl channel)",
       [](C& c, S v) { c.estimation = parse_estimation_method(v); },
       [](const C& c) { return std::string(to_string(c.estimation)); }},
      {"trials", "Monte-Carlo trials per SNR point",
       [](C& c, S v) { c.trials = to_u64(v); },
       [](const C& c) { return std::to_string(c.trials); }},
      {"master_seed", "64-bit master seed (decimal or 0x hex)",
       [](C& c, S v) { c.master_seed = to_u64(v); },
       [](const C& c) { return std::to_string(c.master_seed); }},
      {"corpus.channels", "feature channels C",
       [](C& c, S v) { c.corpus.channels = to_u64(v); },
       [](const C& c) { return std::to_string(c.corpus.channels); }},
      {"corpus.height", "feature height H",
       [](C& c, S v) { c.corpus.height = to_u64(v); },
       [](const C& c) { return std::to_string(c.corpus.height); }},
      {"corpus.width", "feature width W",
       [](C& c, S v) { c.corpus.width = to_u64(v); },
       [](const C& c) { return std::to_string(c.corpus.width); }},
      {"corpus.blobs", "Gaussian blobs per feature tensor",
       [](C& c, S v) { c.corpus.blobs = to_u64(v); },
       [](const C& c) { return std::to_string(c.corpus.blobs); }},
      {"corpus.blob_sigma", "blob standard deviation in cells",
       [](C& c, S v) { c.corpus.blob_sigma = to_double(v); },
       [](const C& c) { return fmt_double(c.corpus.blob_sigma); }},
      {"ofdm.l_fft", "subcarriers",
       [](C& c, S v) { c.ofdm.l_fft = to_u64(v); },
       [](const C& c) { return std::to_string(c.ofdm.l_fft); }},
      {"ofdm.l_cp", "cyclic prefix in samples",
       [](C& c, S v) { c.ofdm.l_cp = to_u64(v); },
       [](const C& c) { return std::to_string(c.ofdm.l_cp); }},
      {"ofdm.n_p", "pilot symbols for the block scheme (slot stays 14 symbols)",
       [](C& c, S v) { c.ofdm.n_p = to_u64(v); },
       [](const C& c) { return std::to_string(c.ofdm.n_p); }},
      {"ofdm.delta_f", "subcarrier spacing in Hz",
       [](C& c, S v) { c.ofdm.delta_f = to_double(v); },
       [](const C& c) { return fmt_double(c.ofdm.delta_f); }},
      {"ofdm.f_c", "carrier frequency in Hz",
       [](C& c, S v) { c.ofdm.f_c = to_double(v); },
       [](const C& c) { return fmt_double(c.ofdm.f_c); }},
      {"ofdm.power", "average transmit power P",
       [](C& c, S v) { c.ofdm.power = to_double(v); },
       [](const C& c) { return fmt_double(c.ofdm.power); }},
  };
  return k;
}

const Key* find_key(std::string_view name) {
  for (const auto& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

bool ExperimentConfig::is_tdl() const { return channel.rfind("tdl-", 0) == 0; }

void ExperimentConfig::validate() const {
  if (snr_grid_db.empty()) throw ConfigError("snr_grid_db: at least one SNR point required");
  for (double s : snr_grid_db) {
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
      throw ConfigError("snr_grid_db: values must be numbers above -inf");
    }
  }
  if (trials < 1) throw ConfigError("trials: must be at least 1");
  if (corpus.channels == 0 || corpus.height == 0 || corpus.width == 0) {
    throw ConfigError("corpus: dimensions must be positive");
  }
  if (!(corpus.blob_sigma > 0.0)) throw ConfigError("corpus.blob_sigma: must be positive");
  rethrow_as_config("cr", [&] { return retained_cells(cr, corpus.height * corpus.width); });
  if (retained_cells(cr, corpus.height * corpus.width) == 0) {
    throw ConfigError("cr: keeps no cell of the feature plane");
  }

  if (codec != "pairing" && codec != "linear") {
    throw ConfigError("codec: expected pairing or linear, got '" + codec + "'");
  }
  if (codec == "linear") {
    const std::size_t n = retained_cells(cr, corpus.height * corpus.width) * corpus.channels;
    if (latent_dim % 2 != 0) throw ConfigError("codec.latent_dim: must be even");
    if (latent_dim >= n) throw ConfigError("codec.latent_dim: must be below the packed length");
    if (latent_dim == 0 && n / 2 < 2) throw ConfigError("codec.latent_dim: packed vector too short");
    if (train_epochs < 1 || train_samples < 1) {
      throw ConfigError("codec.train_epochs and codec.train_samples must be positive");
    }
    if (std::isnan(train_snr_db)) throw ConfigError("codec.train_snr_db: not a number");
  }
  if (chain == ChainKind::Digital && modulation_order != 16 && modulation_order != 256) {
    throw ConfigError("digital.modulation_order: expected 16 or 256");
  }

  if (channel != "awgn" && channel != "rayleigh" && !is_tdl()) {
    throw ConfigError("channel: unknown channel '" + channel + "'");
  }
  if (channel == "rayleigh" && !(rayleigh_hc > 0.0)) {
    throw ConfigError("channel.rayleigh_hc: must be positive");
  }
  if (estimation == EstimationMethod::MMSE &&
      std::any_of(snr_grid_db.begin(), snr_grid_db.end(), [](double s) { return std::isinf(s); })) {
    throw ConfigError("estimation: mmse needs finite SNR points");
  }
  if (estimation != EstimationMethod::Perfect && !is_tdl()) {
    throw ConfigError("estimation: ls and mmse need a tdl channel");
  }
  if (is_tdl()) {
    const TdlModel model =
        rethrow_as_config("channel", [&] { return parse_tdl_model(channel.substr(4)); });
    if (!(ds_desired_ns > 0.0)) throw ConfigError("channel.ds_desired_ns: must be positive");
    if (!(speed_mps >= 0.0) || !std::isfinite(speed_mps)) {
      throw ConfigError("channel.speed_mps: must be finite and nonnegative");
    }
    const OfdmConfig oc = rethrow_as_config("ofdm", [&] {
      const OfdmConfig c = config_for_scheme(PilotScheme::make(pilot_scheme, ofdm.n_p), ofdm);
      c.validate();
      return c;
    });
    const auto delays = scale_delays(tdl_profile(model), ds_desired_ns);
    oc.require_cp_covers(*std::max_element(delays.begin(), delays.end()));
  }
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": repeated key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    rethrow_as_config(where + ": " + key, [&] {
      k->set(cfg, value);
      return 0;
    });
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::vector<const Key*> sorted;
  for (const auto& k : keys()) sorted.push_back(&k);
  std::sort(sorted.begin(), sorted.end(), [](const Key* a, const Key* b) { return a->name < b->name; });
  std::string out;
  for (const Key* k : sorted) {
    out += k->name;
    out += " = ";
    out += k->get(cfg);
    out += '\n';
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_config_reference(std::ostream& os) {
  const ExperimentConfig defaults;
  for (const auto& k : keys()) {
    os << k.name << " = " << k.get(defaults) << "    # " << k.doc << '\n';
  }
}

}  // namespace semlink
