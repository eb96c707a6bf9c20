#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "squarefall/arith.hpp"
#include "squarefall/limit.hpp"
#include "squarefall/process.hpp"
#include "squarefall/rng.hpp"
#include "squarefall/smooth.hpp"
#include "squarefall/witness.hpp"

#ifndef SQUAREFALL_VERSION
#define SQUAREFALL_VERSION "dev"
#endif

namespace squarefall::cli {

namespace {

using json = nlohmann::ordered_json;
using arith::u64;
using Args = std::map<std::string, std::string>;

constexpr const char* kOutputSchema = "squarefall/1";
constexpr const char* kManifestSchema = "squarefall.manifest/1";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Argument conversion. Options arrive as strings so that the resolved set can
// be written to a manifest and replayed verbatim.
// ---------------------------------------------------------------------------

const std::string& raw(const Args& a, const std::string& name) {
  const auto it = a.find(name);
  if (it == a.end()) throw std::logic_error("missing option " + name);
  return it->second;
}

bool is_auto(const Args& a, const std::string& name) {
  const std::string& v = raw(a, name);
  return v.empty() || v == "auto";
}

u64 as_u64(const Args& a, const std::string& name) {
  const std::string& t = raw(a, name);
  const auto bad = [&] { return UsageError("--" + name + ": not a non-negative integer: '" + t + "'"); };
  if (t.empty()) throw bad();
  if (std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return std::stoull(t);
    } catch (const std::exception&) {
      throw bad();
    }
  }
  // Scientific notation such as 1e8, as long as the value is an integer.
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw bad();
  }
  if (used != t.size() || !std::isfinite(v) || v < 0 || v >= 0x1p64 || v != std::floor(v)) throw bad();
  return static_cast<u64>(v);
}

double as_real(const Args& a, const std::string& name) {
  const std::string& t = raw(a, name);
  if (t == "inf" || t == "infinity") return limit::kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + name + ": not a number: '" + t + "'");
  }
  if (used != t.size() || std::isnan(v)) throw UsageError("--" + name + ": not a number: '" + t + "'");
  return v;
}

Count as_count(const Args& a, const std::string& name) {
  try {
    return Count::parse(raw(a, name));
  } catch (const std::invalid_argument&) {
    throw UsageError("--" + name + ": not a count or 'inf': '" + raw(a, name) + "'");
  }
}

unsigned as_threads(const Args& a) {
  if (is_auto(a, "threads")) return process::default_threads();
  const u64 t = as_u64(a, "threads");
  if (t == 0 || t > 4096) throw UsageError("--threads must be between 1 and 4096");
  return static_cast<unsigned>(t);
}

void require_format(const Args& a, std::initializer_list<const char*> allowed) {
  const std::string& f = raw(a, "format");
  for (const char* ok : allowed)
    if (f == ok) return;
  std::string list;
  for (const char* ok : allowed) list += std::string(list.empty() ? "" : ", ") + ok;
  throw UsageError("--format '" + f + "' not supported here (use " + list + ")");
}

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json count_json(const Count& c) {
  if (c.is_infinite()) return "inf";
  return c.value();
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "NA";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Writes a flat JSON object as a two-line CSV.
void write_csv_record(std::ostream& os, const json& obj) {
  std::string head, row;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_structured()) continue;
    head += (head.empty() ? "" : ",") + key;
    row += (row.empty() ? "" : ",") + csv_cell(value);
  }
  os << head << "\n" << row << "\n";
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

class Output {
 public:
  Output(std::ostream& console, std::string path) : console_(console), path_(std::move(path)) {}

  bool to_file() const { return !path_.empty(); }
  const std::string& path() const { return path_; }
  const std::vector<std::string>& written() const { return written_; }

  std::ostream& main() { return to_file() ? open(path_) : console_; }
  /// A companion file next to --out, or the fallback stream without --out.
  std::ostream& side(const std::string& suffix, std::ostream& fallback) {
    return to_file() ? open(path_ + suffix) : fallback;
  }

  void finish() {
    for (auto& f : files_) {
      f->flush();
      if (!*f) throw std::runtime_error("failed writing output file");
    }
    files_.clear();
  }

 private:
  std::ostream& open(const std::string& p) {
    for (std::size_t i = 0; i < written_.size(); ++i)
      if (written_[i] == p) return *files_[i];
    auto f = std::make_unique<std::ofstream>(p, std::ios::binary | std::ios::trunc);
    if (!*f) throw std::runtime_error("cannot open output file '" + p + "'");
    written_.push_back(p);
    files_.push_back(std::move(f));
    return *files_.back();
  }

  std::ostream& console_;
  std::string path_;
  std::vector<std::string> written_;
  std::vector<std::unique_ptr<std::ofstream>> files_;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_manifest(const std::string& command, const Args& args, const Output& output) {
  json m;
  m["schema"] = kManifestSchema;
  m["tool"] = "squarefall";
  m["version"] = SQUAREFALL_VERSION;
  m["command"] = command;
  json params = json::object();
  for (const auto& [k, v] : args) params[k] = v;
  m["params"] = params;
  m["seed"] = args.count("seed") ? json(args.at("seed")) : json(nullptr);
  m["timestamp"] = utc_timestamp();
  m["outputs"] = output.written();
  std::ofstream f(output.path() + ".manifest.json", std::ios::binary | std::ios::trunc);
  f << m.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write manifest");
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

smooth::PsiMode resolve_mode(const Args& a, u64 x) {
  if (is_auto(a, "mode")) return x <= smooth::kPsiExactMax ? smooth::PsiMode::Exact : smooth::PsiMode::HT;
  try {
    return smooth::parse_psi_mode(raw(a, "mode"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--mode: ") + e.what());
  }
}

arith::PrimeTable table_for(u64 x, u64 at_least = 0) {
  const u64 bound = std::max<u64>({smooth::params_table_bound(std::max<u64>(x, 100)), at_least, 100'000});
  return arith::sieve_primes(std::min<u64>(bound, arith::kMaxSieveBound));
}

json params_json(const smooth::SmoothParams& p) {
  json j;
  j["x"] = p.x;
  j["mode"] = smooth::to_string(p.mode);
  j["y0"] = p.y0;
  j["u0"] = num(p.u0);
  j["J0"] = num(p.J0);
  j["alpha0"] = num(p.alpha0);
  j["psi_y0"] = num(p.psi_y0);
  j["pi_y0"] = p.pi_y0;
  j["log_y0_over_log_L"] = num(p.log_y0_over_log_L);
  j["second_order_prediction"] = num(p.second_order_prediction);
  j["log_y0_over_prediction"] = num(p.log_y0_over_prediction);
  return j;
}

void emit(Output& out, const Args& a, const json& j) {
  if (raw(a, "format") == "csv") {
    write_csv_record(out.main(), j);
  } else {
    out.main() << j.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

void cmd_params(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"json", "csv"});
  const u64 x = as_u64(a, "x");
  const auto mode = resolve_mode(a, x);
  const auto table = table_for(x);
  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "params";
  j.update(params_json(smooth::find_params(x, mode, table)));
  emit(out, a, j);
}

void cmd_psi(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"json", "csv"});
  const u64 x = as_u64(a, "x");
  const u64 y = as_u64(a, "y");
  const std::string method = raw(a, "method");
  const std::vector<std::string> methods = {"all", "exact", "sweep", "recursive", "ht", "dickman"};
  if (std::find(methods.begin(), methods.end(), method) == methods.end())
    throw UsageError("--method must be one of all, exact, sweep, recursive, ht, dickman");
  if (x < 1) throw UsageError("--x must be at least 1");
  const bool want_exact = method == "all" ? x <= smooth::kPsiExactMax
                                          : method == "exact" || method == "sweep" || method == "recursive";
  const bool saddle_ok = y >= 2 && y <= x;
  const bool want_ht = method == "ht" || (method == "all" && saddle_ok);
  const bool want_dickman = method == "dickman" || (method == "all" && y >= 2);
  if (method == "dickman" && y < 2) throw UsageError("dickman estimate needs y >= 2");

  const u64 need = std::min(x, y);
  const auto table = arith::sieve_primes(std::clamp<u64>(need, 2, arith::kMaxSieveBound));
  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "psi";
  j["x"] = x;
  j["y"] = y;
  j["method"] = method;
  j["u"] = y >= 2 ? num(std::log(static_cast<double>(x)) / std::log(static_cast<double>(y))) : json(nullptr);
  j["psi_exact"] = nullptr;
  if (want_exact) {
    u64 v = 0;
    if (method == "sweep") v = smooth::psi_exact_sweep(x, y, table);
    else if (method == "recursive") v = smooth::psi_exact_recursive(x, y, table);
    else v = smooth::psi_exact(x, y, table);
    j["psi_exact"] = v;
  }
  j["alpha"] = saddle_ok && (want_ht || method == "all") ? num(smooth::saddle_alpha(x, y, table)) : json(nullptr);
  j["psi_ht_log"] = want_ht ? num(smooth::psi_ht_log(x, y, table)) : json(nullptr);
  j["psi_ht"] = want_ht ? num(smooth::psi_ht(x, y, table)) : json(nullptr);
  j["psi_ht_asymptotic_log"] = want_ht ? num(smooth::psi_ht_asymptotic_log(x, y, table)) : json(nullptr);
  j["psi_dickman_log"] = want_dickman ? num(smooth::psi_dickman_log(x, y)) : json(nullptr);
  j["psi_dickman"] = want_dickman ? num(smooth::psi_dickman(x, y)) : json(nullptr);
  emit(out, a, j);
}

void cmd_tune(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"json", "csv"});
  const u64 x = as_u64(a, "x");
  const double c = as_real(a, "c");
  const std::string est = raw(a, "estimator");
  smooth::TuneEstimator e;
  if (est == "dickman") e = smooth::TuneEstimator::Dickman;
  else if (est == "ht") e = smooth::TuneEstimator::HT;
  else if (est == "exact") e = smooth::TuneEstimator::Exact;
  else throw UsageError("--estimator must be dickman, ht or exact");
  const auto table = table_for(x);
  const auto r = smooth::tune_factor_base(x, c, table, e);
  const auto p = smooth::find_params(x, resolve_mode(a, x), table);
  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "tune";
  j["x"] = x;
  j["c"] = num(c);
  j["estimator"] = est;
  j["y1"] = num(r.y1);
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["relative_residual"] = num(r.relative_residual);
  j["y0"] = p.y0;
  j["y1_below_y0"] = r.y1 < static_cast<double>(p.y0);
  emit(out, a, j);
}

json trial_json(const process::TrialResult& r) {
  json j;
  j["type"] = "trial";
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["truncated"] = r.truncated;
  j["T"] = r.T;
  j["I_size"] = r.I_size();
  j["T_over_J0"] = num(r.T_over_J0);
  j["max_prime_in_I"] = r.max_prime_in_I;
  j["square_verified"] = r.square_verified;
  j["unique_verified"] = r.unique_verified ? json(*r.unique_verified) : json(nullptr);
  j["largest_prime_log2_hist"] = r.largest_prime_log2_hist;
  j["I"] = r.I;
  j["I_values"] = r.I_values;
  return j;
}

void cmd_simulate(const Args& a, Output& out, std::ostream& err) {
  require_format(a, {"jsonl", "csv"});
  const u64 x = as_u64(a, "x");
  const u64 trials = as_u64(a, "trials");
  const u64 seed = as_u64(a, "seed");
  const u64 max_samples = as_u64(a, "max-samples");
  const double epsilon = as_real(a, "epsilon");
  if (x < 1) throw UsageError("--x must be at least 1");
  if (max_samples < 1) throw UsageError("--max-samples must be at least 1");
  const unsigned threads = as_threads(a);

  const auto table = table_for(x);
  std::optional<smooth::SmoothParams> params;
  if (x >= 100) params = smooth::find_params(x, resolve_mode(a, x), table);
  double J0 = params ? params->J0 : 0.0;
  if (!is_auto(a, "J0")) {
    J0 = as_real(a, "J0");
    if (!(J0 > 0) || !std::isfinite(J0)) throw UsageError("--J0 must be positive");
    if (params) params->J0 = J0;
  }
  const auto results = process::run_campaign(x, trials, seed, threads, table, J0, max_samples);

  const bool csv = raw(a, "format") == "csv";
  std::ostream& os = out.main();
  if (csv) os << "trial,seed,truncated,T,I_size,T_over_J0,max_prime_in_I,square_verified,unique_verified\n";
  for (const auto& r : results) {
    const json j = trial_json(r);
    if (csv) {
      os << r.trial << "," << r.seed << "," << (r.truncated ? "true" : "false") << "," << r.T << ","
         << r.I_size() << "," << csv_cell(j["T_over_J0"]) << "," << r.max_prime_in_I << ","
         << (r.square_verified ? "true" : "false") << "," << csv_cell(j["unique_verified"]) << "\n";
    } else {
      os << j.dump() << "\n";
    }
  }

  json s;
  s["type"] = "summary";
  s["schema"] = kOutputSchema;
  s["command"] = "simulate";
  s["x"] = x;
  s["trials"] = trials;
  s["master_seed"] = seed;
  s["J0"] = num(J0);
  s["y0"] = params ? json(params->y0) : json(nullptr);
  std::size_t verified = 0, unique_checked = 0, unique_ok = 0;
  for (const auto& r : results) {
    if (r.truncated) continue;
    verified += r.square_verified;
    if (r.unique_verified) {
      ++unique_checked;
      unique_ok += *r.unique_verified;
    }
  }
  s["square_verified"] = verified;
  s["uniqueness_checked"] = unique_checked;
  s["uniqueness_confirmed"] = unique_ok;
  if (!results.empty() && params) {
    const auto rep = process::theorem2_diagnostics(results, *params, epsilon);
    s["completed"] = rep.completed;
    s["truncated"] = rep.truncated;
    s["mean_T_over_J0"] = num(rep.mean_T_over_J0);
    s["median_T_over_J0"] = num(rep.median_T_over_J0);
    json d;
    d["epsilon"] = num(rep.epsilon);
    d["c3"] = num(rep.c3);
    d["size_window"] = {num(rep.size_lo), num(rep.size_hi)};
    d["fraction_size_in_window"] = num(rep.frac_size_in_window);
    d["smooth_bound"] = num(rep.smooth_bound);
    d["fraction_smooth_in_bound"] = num(rep.frac_smooth_in_bound);
    d["early_threshold"] = num(rep.early_threshold);
    d["early"] = rep.early;
    d["early_single"] = rep.early_single;
    d["single_square"] = rep.single_square;
    d["mean_I_size"] = num(rep.mean_I_size);
    d["median_I_size"] = num(rep.median_I_size);
    s["theorem2"] = d;
  } else {
    std::size_t completed = 0;
    for (const auto& r : results) completed += !r.truncated;
    s["completed"] = completed;
    s["truncated"] = results.size() - completed;
    s["mean_T_over_J0"] = nullptr;
    s["median_T_over_J0"] = nullptr;
    s["theorem2"] = nullptr;
  }
  // With CSV on the console the summary goes to the error stream.
  std::ostream& ss = out.side(".summary.json", csv ? err : out.main());
  ss << (out.to_file() ? s.dump(2) : s.dump()) << "\n";
}

void cmd_pseudo(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"json", "csv"});
  const u64 x = as_u64(a, "x");
  const double M = as_real(a, "M");
  const Count k = as_count(a, "k");
  const Count m = as_count(a, "m");
  const double eta = as_real(a, "eta");
  const u64 seed = as_u64(a, "seed");
  if (m.is_infinite()) throw UsageError("--m must be finite for witness counting");
  if (!(M > 1) || std::isinf(M)) throw UsageError("--M must be finite and above 1");
  if (x < 100) throw UsageError("--x must be at least 100");

  std::optional<smooth::SmoothParams> params;
  const auto need_params = [&] {
    if (!params) params = smooth::find_params(x, resolve_mode(a, x), table_for(x));
    return *params;
  };
  const u64 y = is_auto(a, "y") ? need_params().y0 : as_u64(a, "y");
  if (y < 2) throw UsageError("--y must be at least 2");
  std::size_t J = 0;
  if (is_auto(a, "J")) {
    if (!(eta > 0)) throw UsageError("--eta must be positive");
    J = static_cast<std::size_t>(std::floor(eta * need_params().J0));
  } else {
    J = as_u64(a, "J");
  }
  const auto table = table_for(x, y);

  process::ProcessConfig cfg;
  cfg.x = x;
  cfg.seed = seed;
  cfg.class_params = process::ClassParams{y, M, k};
  const auto stream = process::simulate_stream(cfg, J, table);
  const witness::ChiParams cp{m.value(), k, M};
  const auto w = witness::count_pseudosmooths(stream, cp);
  const std::size_t Y = J ? witness::count_singleton_hits(stream, cp, 1, J) : 0;
  std::size_t delta = 0, large = 0;
  for (const auto& c : stream) {
    delta += c.tag == process::ClassTag::Delta;
    large += c.tag == process::ClassTag::Large;
  }
  const double pi_y = static_cast<double>(table.pi(y));

  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "pseudo";
  j["x"] = x;
  j["y"] = y;
  j["M"] = num(M);
  j["k"] = count_json(k);
  j["m"] = m.value();
  j["J"] = J;
  j["seed"] = seed;
  j["J0"] = params ? num(params->J0) : json(nullptr);
  j["pi_y"] = table.pi(y);
  j["Z"] = w.Z;
  j["Y"] = Y;
  j["smooth"] = w.smooth;
  j["large"] = large;
  j["delta"] = delta;
  j["rank_deficiency"] = w.rank_deficiency;
  j["Z_over_rank_deficiency"] = w.rank_deficiency ? num(static_cast<double>(w.Z) / w.rank_deficiency) : json(nullptr);
  j["Z_over_pi_y"] = num(static_cast<double>(w.Z) / pi_y);
  j["rank_deficiency_over_pi_y"] = num(static_cast<double>(w.rank_deficiency) / pi_y);
  j["chi_evaluations"] = w.chi_evaluations;
  j["not_tree_like"] = w.not_tree_like;
  j["not_tree_like_rate"] =
      w.chi_evaluations ? num(static_cast<double>(w.not_tree_like) / w.chi_evaluations) : json(nullptr);
  j["Z_within_rank_deficiency"] = w.Z <= w.rank_deficiency;
  emit(out, a, j);
}

void cmd_table(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"csv", "json"});
  const std::string mode = raw(a, "mode");
  if (mode != "table" && mode != "theorem" && mode != "both")
    throw UsageError("--mode must be table, theorem or both");
  std::vector<std::pair<std::string, limit::EtaTable>> cols;
  if (mode != "theorem") cols.emplace_back("", limit::eta_table(limit::EtaMode::Table));
  if (mode != "table") cols.emplace_back("theorem ", limit::eta_table(limit::EtaMode::Theorem));
  const auto m_label = [](double M) {
    std::ostringstream os;
    if (std::isinf(M)) os << "inf";
    else os << M;
    return os.str();
  };

  if (raw(a, "format") == "csv") {
    std::ostream& os = out.main();
    os << "k";
    for (const auto& [prefix, t] : cols)
      for (double M : limit::EtaTable::Ms) os << "," << prefix << "M=" << m_label(M);
    os << "\n";
    for (std::size_t r = 0; r < limit::EtaTable::ks.size(); ++r) {
      os << limit::EtaTable::ks[r];
      for (const auto& [prefix, t] : cols)
        for (std::size_t c = 0; c < limit::EtaTable::Ms.size(); ++c) {
          std::ostringstream cell;
          if (std::isnan(t.value[r][c])) cell << "NA";
          else cell << std::fixed << std::setprecision(6) << t.value[r][c];
          os << "," << cell.str();
        }
      os << "\n";
    }
    return;
  }
  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "table";
  j["mode"] = mode;
  j["k"] = limit::EtaTable::ks;
  json Ms = json::array();
  for (double M : limit::EtaTable::Ms) Ms.push_back(num(M));
  j["M"] = Ms;
  for (const auto& [prefix, t] : cols) {
    json rows = json::array();
    for (const auto& row : t.value) {
      json r = json::array();
      for (double v : row) r.push_back(num(v));
      rows.push_back(r);
    }
    j[prefix.empty() ? "table" : "theorem"] = rows;
  }
  out.main() << j.dump(2) << "\n";
}

void cmd_limit(const Args& a, Output& out, std::ostream&) {
  require_format(a, {"json", "csv"});
  limit::LimitParams p;
  p.m = as_count(a, "m");
  p.M = as_real(a, "M");
  p.k = as_count(a, "k");
  p.eta = as_real(a, "eta");
  p.rho = as_real(a, "rho");
  const u64 N = as_u64(a, "N");
  const u64 seed = as_u64(a, "seed");
  p.validate();
  const auto g = limit::gamma_any(p.m, p.M, p.k, p.eta);
  const double th = limit::theta(p);
  json j;
  j["schema"] = kOutputSchema;
  j["command"] = "limit";
  j["m"] = count_json(p.m);
  j["M"] = num(p.M);
  j["k"] = count_json(p.k);
  j["eta"] = num(p.eta);
  j["rho"] = num(p.rho);
  j["gamma"] = num(g.value);
  j["gamma_converged"] = g.converged;
  j["theta_analytic"] = num(th);
  j["N"] = N;
  j["seed"] = seed;
  if (N > 0 && !std::isinf(p.M) && !p.m.is_infinite()) {
    Rng rng(seed);
    const auto est = limit::estimate_theta_mc(p, N, rng);
    const double sd = std::sqrt(th * (1 - th) / static_cast<double>(N));
    j["theta_mc"] = num(est.fraction);
    j["stderr"] = num(est.stderr_);
    j["z_score"] = sd > 0 ? num((est.fraction - th) / sd) : json(nullptr);
  } else {
    j["theta_mc"] = nullptr;
    j["stderr"] = nullptr;
    j["z_score"] = nullptr;
  }
  emit(out, a, j);
}

// ---------------------------------------------------------------------------
// Command table
// ---------------------------------------------------------------------------

struct OptSpec {
  std::string name;
  std::string def;
  std::string help;
  bool required = false;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptSpec> opts;
  std::function<void(const Args&, Output&, std::ostream&)> run;
};

const std::vector<Command>& commands() {
  static const OptSpec out{"out", "", "output file (default: standard output); a manifest is written next to it"};
  static const OptSpec threads{"threads", "auto", "worker threads (default: SQUAREFALL_THREADS, else all cores)"};
  static const OptSpec mode{"mode", "auto", "Psi evaluator for y0/J0: exact, ht or auto"};
  static const std::vector<Command> cmds = {
      {"params", "y0, J0 and the saddle point for x",
       {{"x", "", "upper end of the sampling range", true}, mode, {"format", "json", "json or csv"}, out},
       cmd_params},
      {"psi", "Psi(x, y) by exact counting and the estimators",
       {{"x", "", "x", true},
        {"y", "", "smoothness bound", true},
        {"method", "all", "all, exact, sweep, recursive, ht or dickman"},
        {"format", "json", "json or csv"},
        out},
       cmd_psi},
      {"tune", "factor base size y1 balancing relation collection against linear algebra",
       {{"x", "", "x", true},
        {"c", "1", "constant on the left-hand side"},
        {"estimator", "dickman", "Psi estimator: dickman, ht or exact"},
        mode,
        {"format", "json", "json or csv"},
        out},
       cmd_tune},
      {"simulate", "run independent trials until the first square dependence",
       {{"x", "", "draws are uniform on [1, x]", true},
        {"trials", "100", "number of trials"},
        {"seed", "1", "master seed"},
        threads,
        {"max-samples", "16777216", "truncate a trial after this many draws"},
        {"J0", "auto", "time unit for T/J0 (default: from find_params)"},
        mode,
        {"epsilon", "0", "epsilon in the size and smoothness windows"},
        {"format", "jsonl", "jsonl or csv"},
        out},
       cmd_simulate},
      {"pseudo", "count witnessed pseudosmooths Z against the GF(2) rank deficiency",
       {{"x", "", "x", true},
        {"y", "auto", "lower end of the large-prime window (default y0)"},
        {"M", "10", "window is (y, My)"},
        {"k", "inf", "largest hyperedge size"},
        {"m", "2", "levels of the witness graphs"},
        {"eta", "1", "stream length in units of J0 when --J is auto"},
        {"J", "auto", "stream length"},
        {"seed", "1", "stream seed"},
        mode,
        {"format", "json", "json or csv"},
        out},
       cmd_pseudo},
      {"table", "eta thresholds for k = 0..5 and M = inf, 100, 10",
       {{"mode", "table", "table, theorem or both"}, {"format", "csv", "csv or json"}, out},
       cmd_table},
      {"limit", "theta from the gamma recursion and from the limit hypergraph sampler",
       {{"m", "3", "depth (or inf for the fixed point)"},
        {"M", "10", "M (or inf)"},
        {"k", "4", "k (or inf)"},
        {"eta", "0.5", "eta"},
        {"rho", "2", "rho in [1, M]"},
        {"N", "100000", "Monte Carlo samples (0 to skip)"},
        {"seed", "1", "seed"},
        {"format", "json", "json or csv"},
        out},
       cmd_limit},
  };
  return cmds;
}

json error_json(const std::string& what, int code) {
  json j;
  j["error"] = what;
  j["exit_code"] = code;
  return j;
}

int run_replay(const std::string& manifest_path, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  std::ifstream f(manifest_path);
  if (!f) throw std::runtime_error("cannot read manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (m.value("schema", "") != kManifestSchema) throw UsageError("unrecognised manifest schema");
  std::vector<std::string> args{m.at("command").get<std::string>()};
  for (const auto& [k, v] : m.at("params").items()) {
    if (k == "out") continue;
    args.push_back("--" + k);
    args.push_back(v.get<std::string>());
  }
  args.push_back("--out");
  args.push_back(out_path);
  return run_cli(args, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"squarefall: random squares laboratory"};
  app.name("squarefall");
  app.set_version_flag("--version", SQUAREFALL_VERSION);
  app.require_subcommand(1);
  std::map<std::string, Args> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : commands()) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    Args& store = values[c.name];
    for (const auto& o : c.opts) {
      store[o.name] = o.def;
      CLI::Option* opt = sub->add_option("--" + o.name, store[o.name], o.help);
      if (o.required) opt->required();
      else opt->default_str(o.def);
    }
    subs[c.name] = sub;
  }
  std::string manifest, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest, "manifest written next to an earlier --out")->required();
  replay->add_option("--out", replay_out, "where to write the reproduced output")->required();

  std::string active;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (replay->parsed()) return run_replay(manifest, replay_out, out, err);
    for (const auto& c : commands()) {
      if (!subs.at(c.name)->parsed()) continue;
      active = c.name;
      const Args& a = values.at(c.name);
      Output output(out, a.count("out") ? a.at("out") : "");
      c.run(a, output, err);
      output.finish();
      if (output.to_file()) write_manifest(c.name, a, output);
      return kExitOk;
    }
    throw UsageError("no command given");
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json(e.what(), kExitUsage).dump() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << error_json(e.what(), kExitUsage).dump() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << error_json(e.what(), kExitUsage).dump() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    json j = error_json(e.what(), kExitRuntime);
    if (!active.empty()) j["command"] = active;
    err << j.dump() << "\n";
    return kExitRuntime;
  }
}

}  // namespace squarefall::cli
