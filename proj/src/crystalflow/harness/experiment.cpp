// Copyright 2026 The crystalflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crystalflow/harness/experiment.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "crystalflow/harness/profiles.hpp"
#include "json.hpp"

namespace crystalflow {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) !=
      1) {
    fail(ErrorCode::Io, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string resolve_output_dir(const std::string& directory) {
  fs::path p(directory);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
      p = fs::path(root) / p;
    }
  }
  return p.lexically_normal().string();
}

bool ExperimentOutcome::all_reports_pass() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const EstimateReport& r) { return r.pass; });
}

int ExperimentOutcome::exit_code() const {
  if (!ok) return 2;
  return all_reports_pass() ? 0 : 1;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::string step_name(const char* prefix, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%05d.csv", prefix, k);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Cumulative trapezoid of u along x, anchored at h(0) = 0.
Field height_profile(const Field& u) {
  Field h(u.grid());
  const double dx = u.grid().spacing(0);
  for (std::size_t i = 1; i < u.size(); ++i) {
    h[i] = h[i - 1] + 0.5 * dx * (u[i - 1] + u[i]);
  }
  return h;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg,
                    const ExperimentOutcome& out, std::size_t steps_done,
                    const std::string& started, double seconds) {
  using nlohmann::ordered_json;
  ordered_json m;
  m["tool"] = "crystalflow";
  m["version"] = kVersion;
  m["status"] = out.ok ? "OK" : "FAILED";
  if (!out.ok) {
    m["error"] = {{"message", out.error}, {"step", out.error_step}};
  }
  m["config_sha256"] = sha256_hex(print_config(cfg));
  if (cfg.initial.seed) m["seed"] = *cfg.initial.seed;
  m["started_utc"] = started;
  m["wall_clock_seconds"] = seconds;
  m["steps_completed"] = steps_done == 0 ? 0 : steps_done - 1;
  m["build"] = {{"compiler", __VERSION__},
                {"cxx_standard", __cplusplus},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"openssl", OpenSSL_version(OPENSSL_VERSION)}};
  ordered_json reports = ordered_json::array();
  for (const EstimateReport& r : out.reports) {
    reports.push_back({{"name", r.name}, {"pass", r.pass}, {"margin", r.margin}});
  }
  m["reports"] = reports;

  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  ordered_json artifacts = ordered_json::array();
  for (const fs::path& f : files) {
    const std::string bytes = read_file(f);
    artifacts.push_back({{"path", fs::relative(f, dir).generic_string()},
                         {"bytes", bytes.size()},
                         {"sha256", sha256_hex(bytes)}});
  }
  m["artifacts"] = artifacts;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "k,t_k,picard_iters,newton_used,residual_inf,u_mean,mass,dirichlet,"
        "cosh_energy,l2_time_derivative,w_sup,mass_defect\n";
  if (traj.records.empty()) return;
  const MonitorSeries mon = continuum_monitors(traj);
  const double measure = traj.grid.measure();
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const StepRecord& r = traj.records[i];
    const MonitorSample& s = mon.samples[i];
    os << r.k << ',' << format_real(s.t) << ',' << r.picard_iters << ','
       << (r.newton_used ? 1 : 0) << ',' << format_real(r.residual_inf) << ','
       << format_real(s.mass / measure) << ',' << format_real(s.mass) << ','
       << format_real(s.dirichlet) << ',' << format_real(s.cosh_energy) << ','
       << format_real(s.l2_time_derivative) << ',' << format_real(s.w_sup)
       << ',' << format_real(s.mass_defect) << '\n';
  }
}

std::vector<EstimateReport> compute_reports(const Trajectory& traj,
                                            const ExperimentConfig& cfg) {
  std::vector<EstimateReport> out;
  for (ReportKind kind : cfg.effective_reports()) {
    switch (kind) {
      case ReportKind::Prop31: out.push_back(verify_prop31(traj)); break;
      case ReportKind::Prop32: out.push_back(verify_prop32(traj)); break;
      case ReportKind::Prop33: out.push_back(verify_prop33(traj)); break;
      case ReportKind::PEnergy:
        out.push_back(p_variant_energy(traj, traj.variant.p));
        break;
    }
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  const fs::path dir = resolve_output_dir(cfg.output.directory);
  const fs::path snaps = dir / "snapshots";
  const int stride = cfg.output.snapshot_stride;
  const int steps = cfg.scheme.step_count();

  ExperimentOutcome out;
  out.directory = dir.string();
  Trajectory partial{cfg.scheme, cfg.grid.make(), cfg.variant, {}};
  try {
    fs::create_directories(dir);
    if (stride > 0) fs::create_directories(snaps);
    write_file(dir / "config.ini", print_config(cfg));

    const Field u0 = make_initial(cfg);
    auto observer = [&](const StepRecord& rec) {
      partial.records.push_back(rec);
      if (stride > 0 && (rec.k % stride == 0 || rec.k == steps)) {
        save_snapshot((snaps / step_name("u", rec.k)).string(), rec.u);
        save_snapshot((snaps / step_name("w", rec.k)).string(), rec.w);
        if (cfg.output.height && cfg.grid.dim == 1) {
          save_snapshot((snaps / step_name("h", rec.k)).string(),
                        height_profile(rec.u));
        }
      }
    };
    Trajectory traj = run(u0, cfg.scheme, cfg.variant, observer);
    out.reports = compute_reports(traj, cfg);
    std::ostringstream summary, terms;
    write_reports_csv(summary, out.reports);
    write_report_terms_csv(terms, out.reports);
    write_file(dir / "reports.csv", summary.str());
    write_file(dir / "report_terms.csv", terms.str());
    out.trajectory = std::move(traj);
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
    out.error_step = e.step();
  } catch (const std::exception& e) {
    out.error = e.what();
  }

  try {
    std::ostringstream csv;
    write_trajectory_csv(csv, out.trajectory ? *out.trajectory : partial);
    write_file(dir / "trajectory.csv", csv.str());
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_manifest(dir, cfg, out, partial.records.size(), started, seconds);
  } catch (const std::exception& e) {
    if (out.ok) {
      out.ok = false;
      out.error = e.what();
    }
  }
  return out;
}

Trajectory load_run(const std::string& directory) {
  const fs::path dir(directory);
  const ExperimentConfig cfg = load_config((dir / "config.ini").string());
  if (cfg.output.snapshot_stride != 1) {
    fail(ErrorCode::InvalidArgument,
         "verify needs a snapshot of every step; " + directory +
             " was written with snapshot_stride = " +
             std::to_string(cfg.output.snapshot_stride));
  }
  Trajectory traj{cfg.scheme, cfg.grid.make(), cfg.variant, {}};
  const int steps = cfg.scheme.step_count();
  for (int k = 0; k <= steps; ++k) {
    const fs::path u = dir / "snapshots" / step_name("u", k);
    const fs::path w = dir / "snapshots" / step_name("w", k);
    if (!fs::exists(u) || !fs::exists(w)) {
      fail(ErrorCode::Io, "run in " + directory + " is incomplete: missing step " +
                              std::to_string(k));
    }
    StepRecord rec{k, load_snapshot(u.string()), load_snapshot(w.string()), 0,
                   false, 0.0};
    if (!(rec.u.grid() == traj.grid) || !(rec.w.grid() == traj.grid)) {
      fail(ErrorCode::Io, "snapshot grid of step " + std::to_string(k) +
                              " does not match config.ini");
    }
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

std::vector<EstimateReport> verify_directory(const std::string& directory) {
  const ExperimentConfig cfg =
      load_config((fs::path(directory) / "config.ini").string());
  return compute_reports(load_run(directory), cfg);
}

double l2_distance(const Field& a, const Field& b) {
  const Field d = a - b;
  return std::sqrt(inner(d, d));
}

std::vector<double> successive_orders(const std::vector<double>& steps,
                                      const std::vector<Field>& finals) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(finals.size(), nan);
  if (steps.size() != finals.size()) {
    fail(ErrorCode::InvalidArgument, "successive_orders: size mismatch");
  }
  for (std::size_t i = 0; i + 2 < finals.size(); ++i) {
    const double d0 = l2_distance(finals[i], finals[i + 1]);
    const double d1 = l2_distance(finals[i + 1], finals[i + 2]);
    const double ratio = steps[i] / steps[i + 1];
    if (d0 > 0.0 && d1 > 0.0 && ratio > 1.0) {
      out[i] = std::log(d0 / d1) / std::log(ratio);
    }
  }
  return out;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "tau") return SweepParam::Tau;
  if (name == "eps") return SweepParam::Eps;
  if (name == "K") return SweepParam::K;
  if (name == "p") return SweepParam::P;
  if (name == "amplitude") return SweepParam::Amplitude;
  fail(ErrorCode::InvalidArgument, "unknown sweep parameter '" + name +
                                       "', expected tau, eps, K, p or amplitude");
}

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::Tau: return "tau";
    case SweepParam::Eps: return "eps";
    case SweepParam::K: return "K";
    case SweepParam::P: return "p";
    case SweepParam::Amplitude: return "amplitude";
  }
  return "?";
}

bool SweepSummary::ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const SweepRow& r) { return r.ok; });
}

namespace {

// Runs job(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& job) {
  std::size_t threads =
      workers > 0 ? static_cast<std::size_t>(workers)
                  : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    }));
  }
  for (auto& f : pool) f.get();
}

ExperimentConfig with_param(ExperimentConfig cfg, SweepParam param,
                            double value) {
  switch (param) {
    case SweepParam::Tau:
      cfg.scheme.tau = value;
      break;
    case SweepParam::Eps:
      cfg.scheme.coupling = RegCoupling::decoupled(value);
      break;
    case SweepParam::K:
      if (cfg.variant.kind != VariantKind::ScaledSinh) {
        cfg.variant = Variant::scaled_sinh(value, cfg.variant.normalized);
      }
      cfg.variant.K = value;
      break;
    case SweepParam::P:
      cfg.variant = Variant::p_exponent(value);
      cfg.output.reports.clear();
      break;
    case SweepParam::Amplitude:
      if (cfg.initial.kind == ProfileKind::Constant) {
        cfg.initial.value = value;
      } else {
        cfg.initial.amplitude = value;
      }
      break;
  }
  return cfg;
}

std::string csv_real(double v) {
  return std::isnan(v) ? std::string() : format_real(v);
}

}  // namespace

SweepSummary sweep(const ExperimentConfig& base, SweepParam param,
                   std::vector<double> values, int workers) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "sweep needs values");
  if (param == SweepParam::Tau) {
    std::sort(values.begin(), values.end(), std::greater<>());
  }
  const fs::path root = resolve_output_dir(base.output.directory);
  fs::create_directories(root);
  const std::string pname = sweep_param_name(param);

  SweepSummary summary;
  summary.directory = root.string();
  summary.rows.resize(values.size());
  std::vector<std::optional<Field>> finals(values.size());
  parallel_for(values.size(), workers, [&](std::size_t i) {
    SweepRow& row = summary.rows[i];
    row.value = values[i];
    ExperimentConfig cfg = with_param(base, param, values[i]);
    cfg.output.directory = (root / (pname + "_" + std::to_string(i))).string();
    row.directory = cfg.output.directory;
    try {
      ExperimentOutcome o = run_experiment(cfg);
      row.ok = o.ok;
      row.error = o.error;
      if (o.ok) finals[i] = o.trajectory->records.back().u;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (SweepRow& r : summary.rows) r.l2_to_last = r.observed_order = nan;
  if (finals.back()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (finals[i]) {
        summary.rows[i].l2_to_last = l2_distance(*finals[i], *finals.back());
      }
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (finals[i] && finals[j]) {
        summary.pairwise.emplace_back(i, j, l2_distance(*finals[i], *finals[j]));
      }
    }
  }
  if (param == SweepParam::Tau && summary.ok()) {
    std::vector<Field> f;
    for (auto& x : finals) f.push_back(*x);
    const std::vector<double> orders = successive_orders(values, f);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      summary.rows[i].observed_order = orders[i];
    }
  }

  std::ostringstream s;
  s << "param,value,directory,status,l2_to_last,observed_order\n";
  for (const SweepRow& r : summary.rows) {
    s << pname << ',' << format_real(r.value) << ','
      << fs::path(r.directory).filename().string() << ','
      << (r.ok ? "OK" : "FAILED") << ',' << csv_real(r.l2_to_last) << ','
      << csv_real(r.observed_order) << '\n';
  }
  write_file(root / "sweep_summary.csv", s.str());
  std::ostringstream p;
  p << "value_a,value_b,l2_final\n";
  for (const auto& [i, j, d] : summary.pairwise) {
    p << format_real(values[i]) << ',' << format_real(values[j]) << ','
      << format_real(d) << '\n';
  }
  write_file(root / "sweep_pairwise.csv", p.str());
  return summary;
}

Variant parse_variant(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) {
    const std::string a = spec.substr(colon + 1);
    char* end = nullptr;
    const double v = std::strtod(a.c_str(), &end);
    if (a.empty() || end != a.c_str() + a.size()) {
      fail(ErrorCode::InvalidArgument, "bad variant parameter in '" + spec + "'");
    }
    arg = v;
  }
  Variant v;
  if (name == "sinh") {
    v = Variant::sinh();
  } else if (name == "exp") {
    v = Variant::exp();
  } else if (name == "linear") {
    v = Variant::linear();
  } else if (name == "scaled_sinh") {
    v = Variant::scaled_sinh(arg.value_or(1.0));
  } else if (name == "scaled_sinh_raw") {
    v = Variant::scaled_sinh(arg.value_or(1.0), false);
  } else if (name == "p_exponent") {
    v = Variant::p_exponent(arg.value_or(3.0));
  } else {
    fail(ErrorCode::InvalidArgument,
         "unknown variant '" + name +
             "', expected sinh, exp, linear, scaled_sinh[:K], "
             "scaled_sinh_raw[:K] or p_exponent[:p]");
  }
  if (arg && (v.kind == VariantKind::Sinh || v.kind == VariantKind::Exp ||
              v.kind == VariantKind::Linear)) {
    fail(ErrorCode::InvalidArgument, "variant '" + name + "' takes no parameter");
  }
  v.validate();
  return v;
}

std::vector<Variant> parse_variant_list(const std::string& specs) {
  std::vector<Variant> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = specs.find(',', start);
    const std::string item = specs.substr(start, comma - start);
    if (!item.empty()) out.push_back(parse_variant(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, "no variants listed");
  return out;
}

namespace {

std::string variant_label(const Variant& v) {
  switch (v.kind) {
    case VariantKind::ScaledSinh:
      return (v.normalized ? "scaled_sinh_K" : "scaled_sinh_raw_K") +
             format_real(v.K);
    case VariantKind::PExponent:
      return "p_exponent_p" + format_real(v.p);
    default:
      return v.name();
  }
}

VariantSeries run_variant(const ExperimentConfig& base, const Variant& v,
                          const fs::path& dir, std::optional<Trajectory>* keep) {
  VariantSeries s;
  s.label = variant_label(v);
  s.variant = v;
  ExperimentConfig cfg = base;
  cfg.variant = v;
  cfg.output.reports.clear();
  cfg.output.directory = dir.string();
  try {
    ExperimentOutcome o = run_experiment(cfg);
    s.ok = o.ok;
    s.error = o.error;
    if (o.ok) {
      const MonitorSeries mon = continuum_monitors(*o.trajectory);
      s.samples = mon.samples;
      for (const MonitorSample& m : s.samples) {
        s.max_w_sup = std::max(s.max_w_sup, m.w_sup);
      }
      s.energy_growth = s.samples.back().cosh_energy / s.samples.front().cosh_energy;
      if (keep) *keep = std::move(o.trajectory);
    }
  } catch (const std::exception& e) {
    s.error = e.what();
  }
  return s;
}

}  // namespace

ComparisonReport compare_variants(const ExperimentConfig& base,
                                  const std::vector<Variant>& variants,
                                  const std::vector<double>& k_values,
                                  int workers) {
  validate_config(base);
  const fs::path root = resolve_output_dir(base.output.directory);
  fs::create_directories(root);
  ComparisonReport rep;
  rep.directory = root.string();
  rep.k_values = k_values;

  // Jobs: listed variants, then the linear reference and one run per K.
  std::vector<Variant> jobs = variants;
  if (!k_values.empty()) {
    jobs.push_back(Variant::linear());
    for (double k : k_values) jobs.push_back(Variant::scaled_sinh(k));
  }
  std::vector<VariantSeries> series(jobs.size());
  std::vector<std::optional<Trajectory>> trajs(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const bool k_job = i >= variants.size();
    const std::string sub =
        (k_job ? "ksweep_" : "variant_") + std::to_string(i) + "_" +
        variant_label(jobs[i]);
    series[i] = run_variant(base, jobs[i], root / sub, k_job ? &trajs[i] : nullptr);
  });
  rep.variants.assign(series.begin(), series.begin() + variants.size());

  std::ostringstream sum;
  sum << "variant,status,max_w_sup,energy_growth\n";
  std::ostringstream ser;
  ser << "variant,k,t_k,w_sup,energy,mass\n";
  for (const VariantSeries& s : series) {
    sum << s.label << ',' << (s.ok ? "OK" : "FAILED") << ','
        << (s.ok ? format_real(s.max_w_sup) : "") << ','
        << (s.ok ? format_real(s.energy_growth) : "") << '\n';
    for (const MonitorSample& m : s.samples) {
      ser << s.label << ',' << m.k << ',' << format_real(m.t) << ','
          << format_real(m.w_sup) << ',' << format_real(m.cosh_energy) << ','
          << format_real(m.mass) << '\n';
    }
  }
  write_file(root / "compare_summary.csv", sum.str());
  write_file(root / "compare_series.csv", ser.str());

  if (!k_values.empty()) {
    const std::optional<Trajectory>& ref = trajs[variants.size()];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream ks;
    ks << "K,status,final_l2,max_l2\n";
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      const std::optional<Trajectory>& t = trajs[variants.size() + 1 + i];
      double fin = nan, mx = nan;
      if (ref && t) {
        mx = 0.0;
        for (std::size_t k = 0; k < t->records.size(); ++k) {
          mx = std::max(mx, l2_distance(t->records[k].u, ref->records[k].u));
        }
        fin = l2_distance(t->records.back().u, ref->records.back().u);
      }
      rep.k_final_l2.push_back(fin);
      rep.k_max_l2.push_back(mx);
      ks << format_real(k_values[i]) << ',' << (ref && t ? "OK" : "FAILED")
         << ',' << csv_real(fin) << ',' << csv_real(mx) << '\n';
    }
    // Listed order from large to small K should shrink the distance.
    std::vector<std::size_t> idx(k_values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return k_values[a] > k_values[b];
    });
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (!(rep.k_final_l2[idx[i]] < rep.k_final_l2[idx[i - 1]])) {
        rep.k_monotone = false;
      }
    }
    write_file(root / "compare_scaled_sinh.csv", ks.str());
  }
  return rep;
}

}  // namespace crystalflow
