#include "splitprec/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

#include "splitprec/channel.hpp"
#include "splitprec/evaluation.hpp"

namespace splitprec {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(vs[i]);
  }
  return out;
}

// Channel stream ids for derive_seed.
constexpr std::uint64_t kTrialStream = 1;
constexpr std::uint64_t kCalibrationStream = 2;

std::vector<ChannelMatrix> draw_channels(const SweepConfig& config, int M, std::uint64_t seed) {
  SystemConfig sys = config.system;
  sys.M = M;
  if (config.channel == ChannelModel::rayleigh) return {gen_rayleigh(sys, seed)};
  auto all = gen_mmwave(sys, config.mmwave, seed);
  if (config.subcarrier_stride <= 1) return all;
  std::vector<ChannelMatrix> picked;
  for (std::size_t f = 0; f < all.size(); f += static_cast<std::size_t>(config.subcarrier_stride)) {
    picked.push_back(std::move(all[f]));
  }
  return picked;
}

}  // namespace

std::string Scheme::name() const {
  std::string base;
  switch (kind) {
    case SchemeKind::inf_rzf: base = "inf_rzf"; break;
    case SchemeKind::split: base = to_string(aas); break;
    case SchemeKind::split_quantized_qrzf: base = to_string(aas) + "_qqrzf"; break;
    case SchemeKind::one_stage: base = "one_stage_sesd"; break;
  }
  if (N > 0) base += ":N=" + std::to_string(N);
  if (bits > 0) base += ":B=" + std::to_string(bits);
  if (M > 0) base += ":M=" + std::to_string(M);
  if (max_nodes > 0) base += ":nodes=" + std::to_string(max_nodes);
  return base;
}

Scheme parse_scheme(std::string_view token) {
  std::vector<std::string> parts;
  std::stringstream ss{std::string(token)};
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty() || parts[0].empty()) throw ConfigError("scheme: empty name");

  Scheme s;
  const std::string& base = parts[0];
  if (base == "inf_rzf") {
    s.kind = SchemeKind::inf_rzf;
  } else if (base == "one_stage_sesd") {
    s.kind = SchemeKind::one_stage;
  } else if (base.size() > 6 && base.ends_with("_qqrzf")) {
    s.kind = SchemeKind::split_quantized_qrzf;
    s.aas = parse_aas_method(base.substr(0, base.size() - 6));
  } else {
    s.kind = SchemeKind::split;
    s.aas = parse_aas_method(base);
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("scheme: bad option '" + parts[i] + "'");
    const std::string key = parts[i].substr(0, eq);
    const std::string val = parts[i].substr(eq + 1);
    long long v = 0;
    try {
      v = std::stoll(val);
    } catch (const std::exception&) {
      throw ConfigError("scheme: option '" + key + "' needs an integer");
    }
    if (v <= 0) throw ConfigError("scheme: option '" + key + "' must be positive");
    if (key == "N") {
      s.N = static_cast<int>(v);
    } else if (key == "B") {
      s.bits = static_cast<int>(v);
    } else if (key == "M") {
      s.M = static_cast<int>(v);
    } else if (key == "nodes") {
      s.max_nodes = static_cast<std::uint64_t>(v);
    } else {
      throw ConfigError("scheme: unknown option '" + key + "'");
    }
  }
  return s;
}

std::vector<Scheme> parse_scheme_list(std::string_view csv) {
  std::vector<Scheme> out;
  std::stringstream ss{std::string(csv)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    out.push_back(parse_scheme(item.substr(first, last - first + 1)));
  }
  if (out.empty()) throw ConfigError("schemes: empty list");
  return out;
}

std::string to_string(ChannelModel model) {
  return model == ChannelModel::rayleigh ? "rayleigh" : "mmwave";
}

ChannelModel parse_channel_model(std::string_view name) {
  if (name == "rayleigh") return ChannelModel::rayleigh;
  if (name == "mmwave") return ChannelModel::mmwave;
  throw ConfigError("unknown channel model '" + std::string(name) + "'");
}

int SweepConfig::scheme_N(const Scheme& s) const { return s.N > 0 ? s.N : system.N; }
int SweepConfig::scheme_M(const Scheme& s) const { return s.M > 0 ? s.M : system.M; }
int SweepConfig::scheme_bits(const Scheme& s) const {
  if (s.bits > 0) return s.bits;
  return s.kind == SchemeKind::one_stage ? system.b_one_stage : system.b_split;
}

std::uint64_t SweepConfig::scheme_max_nodes(const Scheme& s) const {
  return s.max_nodes > 0 ? s.max_nodes : max_nodes;
}

bool scheme_needs_quantizer(const Scheme& scheme) { return scheme.kind != SchemeKind::inf_rzf; }

void SweepConfig::validate() const {
  system.validate();
  if (channel == ChannelModel::mmwave) mmwave.validate();
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (schemes.empty()) throw ConfigError("config: no schemes selected");
  if (calibration_draws < 1) throw ConfigError("config: calibration_draws must be >= 1");
  if (subcarrier_stride < 1) throw ConfigError("config: subcarrier_stride must be >= 1");
  for (const auto& s : schemes) {
    const int M = scheme_M(s);
    const int N = scheme_N(s);
    if (M < system.K) throw ConfigError("scheme " + s.name() + ": M must be >= K");
    if (s.kind == SchemeKind::split || s.kind == SchemeKind::split_quantized_qrzf) {
      if (N < system.K || N > M) throw ConfigError("scheme " + s.name() + ": require K <= N <= M");
      if (s.aas != AasMethod::dft && N > system.K) {
        throw ConfigError("scheme " + s.name() + ": gs_mrt and mrt require N <= K");
      }
    }
    if (scheme_needs_quantizer(s)) {
      const int b = scheme_bits(s);
      if (b < 1 || b > 8) throw ConfigError("scheme " + s.name() + ": bits must be in 1..8");
    }
  }
}

KeyValueConfig SweepConfig::snapshot() const {
  KeyValueConfig kv;
  kv.set("M", std::to_string(system.M));
  kv.set("K", std::to_string(system.K));
  kv.set("N", std::to_string(system.N));
  kv.set("q", fmt_double(system.q));
  kv.set("gamma", fmt_double(system.gamma));
  kv.set("snr_db_list", join_doubles(system.snr_db_list));
  kv.set("b_split", std::to_string(system.b_split));
  kv.set("b_one_stage", std::to_string(system.b_one_stage));
  kv.set("channel", to_string(channel));
  if (channel == ChannelModel::mmwave) {
    kv.set("num_taps", std::to_string(mmwave.num_taps));
    kv.set("rician_factor_db", fmt_double(mmwave.rician_factor_db));
    kv.set("num_subcarriers", std::to_string(mmwave.num_subcarriers));
    kv.set("antenna_spacing", fmt_double(mmwave.antenna_spacing));
    kv.set("aoa_min", fmt_double(mmwave.aoa_min));
    kv.set("aoa_max", fmt_double(mmwave.aoa_max));
    kv.set("subcarrier_stride", std::to_string(subcarrier_stride));
  }
  std::string names;
  for (std::size_t i = 0; i < schemes.size(); ++i) names += (i ? "," : "") + schemes[i].name();
  kv.set("schemes", names);
  kv.set("trials", std::to_string(trials));
  kv.set("seed", std::to_string(seed));
  kv.set("mu_dim", mu_dim == MuDimension::N ? "N" : "M");
  kv.set("calibration_draws", std::to_string(calibration_draws));
  kv.set("calibration_snr_db", fmt_double(calibration_snr_db));
  kv.set("one_stage_budget_bits", std::to_string(one_stage_budget_bits));
  kv.set("allow_large", allow_large ? "true" : "false");
  kv.set("max_nodes", std::to_string(max_nodes));
  return kv;
}

std::string SweepConfig::config_hash() const { return fnv1a_hex(snapshot().canonical_text()); }

SweepConfig sweep_config_from(const KeyValueConfig& kv) {
  SweepConfig c;
  c.system = system_config_from(kv);
  c.channel = parse_channel_model(kv.get_string("channel", "rayleigh"));
  if (c.channel == ChannelModel::mmwave) c.mmwave = mmwave_params_from(kv);
  c.schemes = parse_scheme_list(kv.get_string("schemes", "inf_rzf,gs_mrt,mrt,dft"));
  c.trials = kv.get_int("trials", c.channel == ChannelModel::rayleigh ? 500 : 100);
  const std::string seed = kv.get_string("seed", "1");
  try {
    c.seed = std::stoull(seed);
  } catch (const std::exception&) {
    throw ConfigError("config: key 'seed' expects an unsigned integer, got '" + seed + "'");
  }
  const std::string mu = kv.get_string("mu_dim", "N");
  if (mu == "N") {
    c.mu_dim = MuDimension::N;
  } else if (mu == "M") {
    c.mu_dim = MuDimension::M;
  } else {
    throw ConfigError("config: key 'mu_dim' must be N or M");
  }
  c.calibration_draws = kv.get_int("calibration_draws", c.calibration_draws);
  c.calibration_snr_db = kv.get_double("calibration_snr_db", c.calibration_snr_db);
  c.one_stage_budget_bits = kv.get_int("one_stage_budget_bits", c.one_stage_budget_bits);
  c.allow_large = kv.get_bool("allow_large", c.allow_large);
  c.subcarrier_stride = kv.get_int("subcarrier_stride", c.subcarrier_stride);
  const std::string cap = kv.get_string("max_nodes", "0");
  try {
    c.max_nodes = std::stoull(cap);
  } catch (const std::exception&) {
    throw ConfigError("config: key 'max_nodes' expects an unsigned integer, got '" + cap + "'");
  }
  c.validate();
  return c;
}

namespace {

int mu_dimension(const SweepConfig& config, const Scheme& s) {
  if (s.kind == SchemeKind::one_stage) return config.scheme_M(s);
  return config.mu_dim == MuDimension::N ? config.scheme_N(s) : config.scheme_M(s);
}

CMatrix scheme_channel_for_bbu(const SweepConfig& config, const Scheme& s,
                               const ChannelMatrix& channel, CMatrix* aas_matrix) {
  if (s.kind == SchemeKind::one_stage) return channel.H;
  const AasPrecoder aas = select_subspace(s.aas, channel, config.scheme_N(s));
  if (aas_matrix) *aas_matrix = aas.matrix;
  return effective_channel(channel, aas).matrix;
}

}  // namespace

QuantizerSpec calibrate_scheme(const SweepConfig& config, const Scheme& scheme, Execution exec) {
  if (!scheme_needs_quantizer(scheme)) {
    throw ConfigError("calibrate: scheme " + scheme.name() + " is unquantized");
  }
  const int bits = config.scheme_bits(scheme);
  const double eta = distortion_factor(bits);
  const double q = config.system.q;
  const double sigma0_sq =
      noise_variance_for_snr(config.calibration_snr_db, config.system.q, config.system.gamma);
  const int dim = mu_dimension(config, scheme);
  const int M = config.scheme_M(scheme);
  const int draws = config.calibration_draws;

  std::vector<std::vector<double>> per_draw(draws);
  std::vector<std::exception_ptr> errors(draws);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (int d = 0; d < draws; ++d) {
    try {
      const auto channels =
          draw_channels(config, M, derive_seed(config.seed, kCalibrationStream, d));
      for (const auto& ch : channels) {
        const CMatrix H = scheme_channel_for_bbu(config, scheme, ch, nullptr);
        const CMatrix P = qrzf(H, q, sigma0_sq, eta, dim).matrix;
        for (Eigen::Index j = 0; j < P.size(); ++j) {
          per_draw[d].push_back(P(j).real());
          per_draw[d].push_back(P(j).imag());
        }
      }
    } catch (...) {
      errors[d] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<double> samples;
  for (const auto& v : per_draw) samples.insert(samples.end(), v.begin(), v.end());
  return calibrate_step(samples, bits, exec);
}

CalibrationTable calibrate_schemes(const SweepConfig& config, Execution exec) {
  CalibrationTable table;
  for (const auto& s : config.schemes) {
    if (scheme_needs_quantizer(s)) table.emplace(s.name(), calibrate_scheme(config, s, exec));
  }
  return table;
}

double scheme_rate(const SweepConfig& config, const Scheme& scheme, const QuantizerSpec* spec,
                   const ChannelMatrix& channel, double sigma0_sq, TrialStats* stats,
                   Execution inner) {
  const double q = config.system.q;
  if (scheme.kind == SchemeKind::inf_rzf) {
    const CMatrix P = rzf(channel.H, q, sigma0_sq).matrix;
    return sum_rate(channel.H, P, sigma0_sq);
  }
  if (!spec) throw ConfigError("scheme " + scheme.name() + " has no calibrated quantizer");

  BbuOptions opts;
  opts.dim_for_mu = mu_dimension(config, scheme);
  opts.sesd.max_nodes = config.scheme_max_nodes(scheme);
  opts.exec = inner;

  CMatrix P;
  if (scheme.kind == SchemeKind::one_stage) {
    OneStageOptions os;
    os.bbu = opts;
    os.budget_bits = config.one_stage_budget_bits;
    os.allow_large = config.allow_large || opts.sesd.max_nodes > 0;
    const BbuPrecoder b = one_stage_precode(channel, *spec, q, sigma0_sq, os);
    P = b.matrix;
    if (stats) *stats = {b.lambda_star, b.achieved_power, b.total_nodes(), b.exact};
  } else {
    CMatrix A;
    const CMatrix H_eff = scheme_channel_for_bbu(config, scheme, channel, &A);
    if (scheme.kind == SchemeKind::split_quantized_qrzf) {
      const CMatrix PB = quantized_qrzf(H_eff, *spec, q, sigma0_sq, opts.dim_for_mu);
      P = A * PB;
      if (stats) *stats = {0.0, PB.squaredNorm(), 0, true};
    } else {
      const BbuPrecoder b = bbu_precode(EffectiveChannel{H_eff}, *spec, q, sigma0_sq, opts);
      P = A * b.matrix;
      if (stats) *stats = {b.lambda_star, b.achieved_power, b.total_nodes(), b.exact};
    }
  }
  return sum_rate(channel.H, power_scale(P, q), sigma0_sq);
}

const SweepRow& SweepResult::row(const std::string& scheme, double snr_db) const {
  for (const auto& r : rows) {
    if (r.scheme == scheme && r.snr_db == snr_db) return r;
  }
  throw std::out_of_range("sweep: no row for " + scheme + " at " + fmt_double(snr_db) + " dB");
}

const std::vector<double>& SweepResult::rates(const std::string& scheme, double snr_db) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].scheme == scheme && rows[i].snr_db == snr_db) return trial_rates[i];
  }
  throw std::out_of_range("sweep: no row for " + scheme + " at " + fmt_double(snr_db) + " dB");
}

SweepResult run_sweep(const SweepConfig& config, const CalibrationTable& calibration,
                      Execution exec) {
  config.validate();
  const int S = static_cast<int>(config.schemes.size());
  const int T = config.trials;

  std::vector<const QuantizerSpec*> specs(S, nullptr);
  for (int s = 0; s < S; ++s) {
    if (!scheme_needs_quantizer(config.schemes[s])) continue;
    const auto it = calibration.find(config.schemes[s].name());
    if (it == calibration.end()) {
      throw ConfigError("sweep: missing calibration for scheme " + config.schemes[s].name());
    }
    if (it->second.bits != config.scheme_bits(config.schemes[s])) {
      throw ConfigError("sweep: calibration bits mismatch for scheme " + config.schemes[s].name());
    }
    specs[s] = &it->second;
  }

  SweepResult result;
  result.calibration = calibration;
  const std::string hash = config.config_hash();

  for (double snr : config.system.snr_db_list) {
    const double sigma0_sq = noise_variance_for_snr(snr, config.system.q, config.system.gamma);
    std::vector<std::vector<double>> rates(S, std::vector<double>(T, 0.0));
    std::vector<std::vector<TrialStats>> stats(S, std::vector<TrialStats>(T));
    std::vector<std::exception_ptr> errors(T);

#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::parallel)
    for (int t = 0; t < T; ++t) {
      try {
        const std::uint64_t seed = derive_seed(config.seed, kTrialStream, t);
        std::map<int, std::vector<ChannelMatrix>> by_m;
        for (int s = 0; s < S; ++s) {
          const Scheme& scheme = config.schemes[s];
          const int M = config.scheme_M(scheme);
          auto it = by_m.find(M);
          if (it == by_m.end()) it = by_m.emplace(M, draw_channels(config, M, seed)).first;
          const auto& channels = it->second;
          CompensatedSum acc;
          TrialStats agg;
          for (const auto& ch : channels) {
            TrialStats st;
            acc.add(scheme_rate(config, scheme, specs[s], ch, sigma0_sq, &st));
            agg.lambda_star += st.lambda_star;
            agg.power += st.power;
            agg.nodes += st.nodes;
            agg.exact = agg.exact && st.exact;
          }
          const double F = static_cast<double>(channels.size());
          agg.lambda_star /= F;
          agg.power /= F;
          rates[s][t] = acc.value() / F;
          stats[s][t] = agg;
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    for (int s = 0; s < S; ++s) {
      SweepRow row;
      row.scheme = config.schemes[s].name();
      row.channel = to_string(config.channel);
      row.snr_db = snr;
      row.trials = T;
      row.seed = config.seed;
      row.config_hash = hash;
      CompensatedSum sum, lam, pow, nodes;
      for (int t = 0; t < T; ++t) {
        sum.add(rates[s][t]);
        lam.add(stats[s][t].lambda_star);
        pow.add(stats[s][t].power);
        nodes.add(static_cast<double>(stats[s][t].nodes));
        row.all_exact = row.all_exact && stats[s][t].exact;
      }
      row.avg_sum_rate = sum.value() / T;
      if (T > 1) {
        CompensatedSum sq;
        for (int t = 0; t < T; ++t) {
          const double d = rates[s][t] - row.avg_sum_rate;
          sq.add(d * d);
        }
        row.std_err = std::sqrt(sq.value() / (T - 1) / T);
      }
      row.mean_lambda_star = lam.value() / T;
      row.mean_power = pow.value() / T;
      row.mean_nodes = nodes.value() / T;
      result.rows.push_back(std::move(row));
      result.trial_rates.push_back(std::move(rates[s]));
    }
  }
  return result;
}

}  // namespace splitprec
